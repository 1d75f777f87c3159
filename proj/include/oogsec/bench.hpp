#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "oogsec/gridgen.hpp"
#include "oogsec/metrics.hpp"

namespace oogsec {

struct BenchRecord {
    int scenario_id = 0;
    int n_attack = 0;
    int n_monitor = 0;
    double q = std::numeric_limits<double>::quiet_NaN();
    double q_hat = std::numeric_limits<double>::quiet_NaN();
    double relative_gap = std::numeric_limits<double>::quiet_NaN();  // (Q_hat - Q) / Q
    double gamma_u = std::numeric_limits<double>::quiet_NaN();
    double t_full = 0.0;   // SDP time for Q, seconds
    double t_proxy = 0.0;  // SDP time for Q_hat, seconds
    sdp::Status status_full = sdp::Status::NumericalFailure;
    sdp::Status status_proxy = sdp::Status::NumericalFailure;
    sdp::Status status_gamma = sdp::Status::NumericalFailure;
    std::string error;  // non-empty when the scenario threw

    [[nodiscard]] bool both_optimal() const {
        return status_full == sdp::Status::Optimal && status_proxy == sdp::Status::Optimal;
    }
    // Q <= Q_hat (1 + 1e-6) + 1e-9; true for an unbounded Q_hat.
    [[nodiscard]] bool bound_holds() const;
};

struct BenchSummary {
    int records = 0;
    int both_optimal = 0;
    int proxy_unbounded = 0;
    int failures = 0;
    int bound_violations = 0;
    // Medians over records with both results Optimal; NaN when there are none.
    double median_gap = std::numeric_limits<double>::quiet_NaN();
    double median_time_ratio = std::numeric_limits<double>::quiet_NaN();  // t_proxy / t_full
    double median_t_full = std::numeric_limits<double>::quiet_NaN();
    double median_t_proxy = std::numeric_limits<double>::quiet_NaN();
};

struct BenchReport {
    std::vector<BenchRecord> records;  // ordered by scenario_id
    BenchSummary summary;
};

struct BenchOptions {
    int threads = 0;  // <= 0: OOG_THREADS if set, else every logical processor
    sdp::Options solver;
};

// Concurrency cap from OOG_THREADS, falling back to the OpenMP default.
[[nodiscard]] int benchmark_threads(int requested = 0);

// One record per spec; gamma_u is solved once per distinct uncertain subsystem.
// Scenario failures are recorded, never thrown.
[[nodiscard]] BenchReport run_benchmark(const std::vector<GridSpec>& specs, const AttackBudget& budget,
                                        const BenchOptions& options = {});

[[nodiscard]] BenchSummary summarize(const std::vector<BenchRecord>& records);

[[nodiscard]] double median(std::vector<double> values);

// Header then one row per record.
void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);

}  // namespace oogsec
