#include "oogsec/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>

#include <omp.h>

namespace oogsec {

namespace {

bool same_plant(const StateSpace& a, const StateSpace& b) {
    auto eq = [](const Matrix& x, const Matrix& y) {
        return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
    };
    return eq(a.A, b.A) && eq(a.B, b.B) && eq(a.C, b.C) && eq(a.D, b.D);
}

}  // namespace

bool BenchRecord::bound_holds() const {
    if (status_proxy == sdp::Status::Infeasible) return true;
    if (!both_optimal()) return false;
    return q <= q_hat * (1.0 + 1e-6) + 1e-9;
}

int benchmark_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OOG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
        throw ValidationError(std::string("OOG_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max(1, omp_get_max_threads());
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

BenchSummary summarize(const std::vector<BenchRecord>& records) {
    BenchSummary s;
    s.records = static_cast<int>(records.size());
    std::vector<double> gaps, ratios, t_full, t_proxy;
    for (const auto& r : records) {
        if (r.status_proxy == sdp::Status::Infeasible) ++s.proxy_unbounded;
        if (!r.error.empty() || r.status_full == sdp::Status::NumericalFailure ||
            r.status_proxy == sdp::Status::NumericalFailure) {
            ++s.failures;
        }
        if (!r.both_optimal()) continue;
        ++s.both_optimal;
        if (!r.bound_holds()) ++s.bound_violations;
        gaps.push_back(r.relative_gap);
        ratios.push_back(r.t_proxy / r.t_full);
        t_full.push_back(r.t_full);
        t_proxy.push_back(r.t_proxy);
    }
    s.median_gap = median(gaps);
    s.median_time_ratio = median(ratios);
    s.median_t_full = median(t_full);
    s.median_t_proxy = median(t_proxy);
    return s;
}

BenchReport run_benchmark(const std::vector<GridSpec>& specs, const AttackBudget& budget,
                          const BenchOptions& options) {
    budget.validate();
    const auto n = specs.size();
    std::vector<BenchRecord> records(n);
    std::vector<std::pair<CertainSubsystem, UncertainSubsystem>> systems(n);
    std::vector<std::string> build_errors(n);
    for (std::size_t i = 0; i < n; ++i) {
        records[i].scenario_id = static_cast<int>(i);
        records[i].n_attack = static_cast<int>(specs[i].attack_buses.size());
        records[i].n_monitor = static_cast<int>(specs[i].monitor_buses.size());
        try {
            systems[i] = build_partitioned_system(specs[i]);
        } catch (const std::exception& e) {
            build_errors[i] = e.what();
        }
    }

    // gamma_u per distinct uncertain subsystem, in first-seen order.
    std::vector<std::size_t> owner(n, n);
    std::vector<MetricResult> gammas;
    std::vector<std::size_t> distinct;
    for (std::size_t i = 0; i < n; ++i) {
        if (!build_errors[i].empty()) continue;
        for (std::size_t k = 0; k < distinct.size(); ++k) {
            if (same_plant(systems[distinct[k]].second.plant, systems[i].second.plant)) {
                owner[i] = k;
                break;
            }
        }
        if (owner[i] == n) {
            owner[i] = distinct.size();
            distinct.push_back(i);
        }
    }
    gammas.resize(distinct.size());
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        try {
            gammas[k] = gamma_u_model(systems[distinct[k]].second, options.solver);
        } catch (const std::exception& e) {
            gammas[k] = MetricResult{};
            build_errors[distinct[k]] = std::string("gamma_u: ") + e.what();
        }
    }

    const int threads = benchmark_threads(options.threads);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long long ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        BenchRecord& r = records[i];
        if (!build_errors[i].empty()) {
            r.error = build_errors[i];
            continue;
        }
        const MetricResult& gu = gammas[owner[i]];
        r.status_gamma = gu.status;
        r.gamma_u = gu.value;
        try {
            const auto& [sc, su] = systems[i];
            const MetricResult q = solve_oog(sc, su, budget, options.solver);
            r.status_full = q.status;
            r.q = q.value;
            r.t_full = q.solve_time;
            if (gu.optimal()) {
                const MetricResult qh = solve_proxy(sc, gu.value, budget, options.solver);
                r.status_proxy = qh.status;
                r.q_hat = qh.value;
                r.t_proxy = qh.solve_time;
            } else {
                r.error = "gamma_u solve did not reach Optimal";
            }
            if (r.status_proxy == sdp::Status::Infeasible) {
                r.relative_gap = std::numeric_limits<double>::infinity();
            } else if (r.both_optimal()) {
                r.relative_gap = (r.q_hat - r.q) / r.q;
            }
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    }

    BenchReport report;
    report.records = std::move(records);
    report.summary = summarize(report.records);
    return report;
}

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
    os << "scenario_id,n_attack,n_monitor,Q,Q_hat,relative_gap,gamma_u,t_full,t_proxy,status_full,status_proxy,"
          "status_gamma,bound_holds,error\n";
    const auto old = os.precision(12);
    for (const auto& r : records) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << r.scenario_id << ',' << r.n_attack << ',' << r.n_monitor << ',' << r.q << ',' << r.q_hat << ','
           << r.relative_gap << ',' << r.gamma_u << ',' << r.t_full << ',' << r.t_proxy << ','
           << sdp::to_string(r.status_full) << ',' << sdp::to_string(r.status_proxy) << ','
           << sdp::to_string(r.status_gamma) << ',' << (r.bound_holds() ? "true" : "false") << ',' << err << '\n';
    }
    os.precision(old);
}

}  // namespace oogsec
