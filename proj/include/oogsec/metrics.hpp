#pragma once

#include <limits>
#include <optional>

#include "oogsec/sdp.hpp"
#include "oogsec/system.hpp"

namespace oogsec {

// Lower bound standing in for the strict inequalities gamma, psi, theta > 0.
inline constexpr double kStrictLowerBound = 1e-9;

enum class MetricKind { OutputToOutputGain, ProxyGain, UncertainGain };

[[nodiscard]] const char* to_string(MetricKind k);

struct MetricResult {
    MetricKind kind = MetricKind::OutputToOutputGain;
    // Worst-case performance energy (Q, Q_hat) or the squared gain gamma_u.
    // +inf when the multiplier LMI is infeasible.
    double value = std::numeric_limits<double>::quiet_NaN();
    bool unbounded = false;
    double gamma = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> psi;
    std::optional<double> theta;
    Matrix certificate;  // P, P_c or P_u
    sdp::Status status = sdp::Status::NumericalFailure;
    double max_lmi_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    double relative_gap = std::numeric_limits<double>::quiet_NaN();
    double solve_time = 0.0;
    int iterations = 0;

    [[nodiscard]] bool optimal() const { return status == sdp::Status::Optimal; }
    [[nodiscard]] bool usable() const { return optimal() || unbounded; }
};

// [[A'P + PA, PF], [F'P, 0]] - gamma [Cr Fr]'[Cr Fr] - psi blkdiag(0, I) + [Cp Fp]'[Cp Fp] <= 0,
// objective gamma*delta + psi*E. Requires A_bar Hurwitz.
[[nodiscard]] sdp::Problem build_oog_lmi(const AggregatedSystem& agg, const AttackBudget& budget);

// Ground-truth worst-case impact Q with both subsystems known.
[[nodiscard]] MetricResult solve_oog(const CertainSubsystem& sc, const UncertainSubsystem& su,
                                     const AttackBudget& budget, const sdp::Options& options = {});

// Dissipation LMI over (x_c, u_u, a) with the uncertain part replaced by
// ||u_u||^2 <= gamma_u ||u_c||^2. Requires A_c Hurwitz.
[[nodiscard]] sdp::Problem build_proxy_lmi(const CertainSubsystem& sc, double gamma_u, const AttackBudget& budget);

[[nodiscard]] MetricResult solve_proxy(const CertainSubsystem& sc, double gamma_u, const AttackBudget& budget,
                                       const sdp::Options& options = {});

// Squared H-infinity norm of the plant from the bounded-real LMI. Requires A_u Hurwitz.
[[nodiscard]] sdp::Problem build_gamma_u_lmi(const StateSpace& plant);

[[nodiscard]] MetricResult gamma_u_model(const UncertainSubsystem& su, const sdp::Options& options = {});

struct UpperBoundReport {
    MetricResult q;
    MetricResult q_hat;
    double gamma_u = 0.0;
    double gap = std::numeric_limits<double>::quiet_NaN();  // (Q_hat - Q) / max(Q, 1e-12)
    bool holds = false;
    bool evaluated = false;  // both results Optimal or Unbounded
};

// Q <= Q_hat (1 + 1e-6) + 1e-9, an unbounded Q_hat always satisfies it.
[[nodiscard]] UpperBoundReport check_upper_bound(const MetricResult& q, const MetricResult& q_hat);

// Solves Q, gamma_u (model-based) and Q_hat and compares them.
[[nodiscard]] UpperBoundReport verify_upper_bound(const CertainSubsystem& sc, const UncertainSubsystem& su,
                                                  const AttackBudget& budget, const sdp::Options& options = {});

}  // namespace oogsec
