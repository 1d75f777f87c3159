#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "oogsec/kernels.hpp"
#include "oogsec/system.hpp"

namespace oogsec {

// Frequencies in rad/time: strictly increasing, starting at 0 and ending
// with +inf, which stands for the feedthrough limit.
struct FrequencyGrid {
    std::vector<double> points;

    void validate() const;
    [[nodiscard]] std::size_t size() const { return points.size(); }

    // count log-spaced points on [lo, hi], the extra frequencies, 0 and +inf.
    static FrequencyGrid logarithmic(double lo, double hi, int count, const std::vector<double>& extra = {});

    // 2000 points on [1e-3, 1e3] plus |Im lambda| of every eigenvalue of a.
    static FrequencyGrid for_dynamics(const Matrix& a);
};

// Log-spaced multiplier axes plus zero. The best grid point is refined by
// golden-section search between its neighbours, one axis at a time.
struct MultiplierGridSpec {
    double lower = 1e-4;
    double upper = 1e6;
    int points = 60;
    int refine_iterations = 40;

    void validate() const;
};

struct OracleResult {
    double value = std::numeric_limits<double>::infinity();  // +inf when no grid point is feasible
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double psi = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> theta;

    [[nodiscard]] bool feasible() const { return std::isfinite(value); }
};

// max eigenvalue <= 1e-9 at every grid point of
// Gp^H Gp - gamma Gr^H Gr - psi I, with Gp, Gr the closed-loop maps from a.
[[nodiscard]] bool oog_feasible_freq(const AggregatedSystem& agg, double gamma, double psi, const FrequencyGrid& grid);

[[nodiscard]] OracleResult oog_oracle(const CertainSubsystem& sc, const UncertainSubsystem& su,
                                      const AttackBudget& budget, const std::optional<FrequencyGrid>& grid = {},
                                      const MultiplierGridSpec& spec = {}, Execution exec = Execution::Parallel);

// Same test for the proxy: Tp^H Tp + theta gamma_u Tc^H Tc - gamma Tr^H Tr
// - blkdiag(theta I, psi I) over the stacked input (u_u, a).
[[nodiscard]] bool proxy_feasible_freq(const CertainSubsystem& sc, double gamma_u, double gamma, double psi,
                                       double theta, const FrequencyGrid& grid);

[[nodiscard]] OracleResult proxy_oracle(const CertainSubsystem& sc, double gamma_u, const AttackBudget& budget,
                                        const std::optional<FrequencyGrid>& grid = {},
                                        const MultiplierGridSpec& spec = {}, Execution exec = Execution::Parallel);

// Squared peak singular value of the frequency response over the grid,
// refined around the maximizer.
[[nodiscard]] double hinf_sweep(const StateSpace& plant, const std::optional<FrequencyGrid>& grid = {},
                                Execution exec = Execution::Parallel);

}  // namespace oogsec
