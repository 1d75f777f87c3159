#include "oogsec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace oogsec {

namespace {

constexpr double kFreqTol = 1e-9;
// Multipliers built by the oracle sit this far inside the tolerance so that
// they pass the feasibility checks above after rounding.
constexpr double kBuildShift = 0.5 * kFreqTol;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Zero followed by the log-spaced grid values.
std::vector<double> multiplier_axis(const MultiplierGridSpec& spec) {
    std::vector<double> v(static_cast<std::size_t>(spec.points) + 1);
    v[0] = 0.0;
    const double a = std::log(spec.lower);
    const double b = std::log(spec.upper);
    for (int i = 0; i < spec.points; ++i) {
        v[static_cast<std::size_t>(i) + 1] = std::exp(a + (b - a) * i / (spec.points - 1));
    }
    return v;
}

struct Minimum {
    double x = std::numeric_limits<double>::quiet_NaN();
    double value = std::numeric_limits<double>::infinity();
};

// Golden-section search on [a, b] for a convex f, started from the incumbent.
Minimum golden_section(const std::function<double(double)>& f, double a, double b, int iterations, Minimum best) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iterations; ++k) {
        if (fc < best.value) best = {c, fc};
        if (fd < best.value) best = {d, fd};
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    if (fc < best.value) best = {c, fc};
    if (fd < best.value) best = {d, fd};
    return best;
}

// Minimum of a convex f from its values on the axis, refined between the
// neighbours of the best grid point.
Minimum refine_on_axis(const std::function<double(double)>& f, const std::vector<double>& axis,
                       const std::vector<double>& values, int iterations) {
    const auto k = argmin_finite(values);
    if (k == values.size()) return {};
    const double lo = axis[k == 0 ? 0 : k - 1];
    const double hi = axis[std::min(k + 1, axis.size() - 1)];
    return golden_section(f, lo, hi, iterations, {axis[k], values[k]});
}

// N - psi blkdiag(0, I) <= 0 with the u_u block of size mu leading.
// Returns the smallest such psi, or +inf when the u_u block is not negative definite.
double schur_threshold(const ComplexMatrix& n, Eigen::Index mu) {
    const auto k = n.rows();
    const auto ma = k - mu;
    if (ma == 0) return max_eigenvalue_hermitian(n) <= 0.0 ? -kInf : kInf;
    if (mu == 0) return max_eigenvalue_hermitian(n);
    if (mu == 1 && ma == 1) {
        const double n11 = n(0, 0).real();
        if (!(n11 < 0.0)) return kInf;
        return n(1, 1).real() - std::norm(n(0, 1)) / n11;
    }
    const ComplexMatrix n11 = n.topLeftCorner(mu, mu);
    if (!(max_eigenvalue_hermitian(n11) < 0.0)) return kInf;
    const ComplexMatrix s = n.bottomRightCorner(ma, ma) -
                            n.bottomLeftCorner(ma, mu) * n11.ldlt().solve(n.topRightCorner(mu, ma));
    return max_eigenvalue_hermitian(0.5 * (s + s.adjoint()));
}

struct ProxyTables {
    std::vector<ComplexMatrix> perf, resid, coupling;
    Eigen::Index mu = 0;
};

ProxyTables proxy_tables(const CertainSubsystem& sc, const FrequencyGrid& grid, Execution exec) {
    const Matrix b = hstack({&sc.B_c, &sc.F_x});
    auto t = tabulate_grams(sc.A_c, b,
                            {{sc.C_p, hstack({&sc.D_p, &sc.F_p})},
                             {sc.C_r, hstack({&sc.D_r, &sc.F_r})},
                             {sc.C_c, hstack({&sc.D_c, &sc.F_c})}},
                            grid.points, exec);
    return {std::move(t[0]), std::move(t[1]), std::move(t[2]), sc.coupling_inputs()};
}

ComplexMatrix proxy_kernel(const ProxyTables& t, std::size_t i, double gamma_u, double gamma, double theta) {
    ComplexMatrix n = t.perf[i] + (theta * gamma_u) * t.coupling[i] - gamma * t.resid[i];
    n.diagonal().head(t.mu).array() -= theta;
    return n;
}

void require_hurwitz(const Matrix& a, const char* what) {
    if (!is_hurwitz(a)) throw StabilityError(std::string(what) + " is not Hurwitz");
}

}  // namespace

void FrequencyGrid::validate() const {
    if (points.size() < 2 || points.front() != 0.0 || !std::isinf(points.back())) {
        throw ValidationError("frequency grid must start at 0 and end with +inf");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i] > points[i - 1])) throw ValidationError("frequency grid must be strictly increasing");
    }
}

FrequencyGrid FrequencyGrid::logarithmic(double lo, double hi, int count, const std::vector<double>& extra) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ValidationError("frequency grid: need 0 < lo < hi, count >= 2");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(count) + extra.size() + 2);
    pts.push_back(0.0);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < count; ++i) pts.push_back(std::pow(10.0, a + (b - a) * i / (count - 1)));
    for (double w : extra) {
        if (std::isfinite(w) && w > 0.0) pts.push_back(w);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    pts.push_back(kInf);
    return FrequencyGrid{std::move(pts)};
}

FrequencyGrid FrequencyGrid::for_dynamics(const Matrix& a) {
    std::vector<double> extra;
    if (a.rows() > 0) {
        Eigen::EigenSolver<Matrix> es(a, false);
        for (const auto& lambda : es.eigenvalues()) extra.push_back(std::abs(lambda.imag()));
    }
    return logarithmic(1e-3, 1e3, 2000, extra);
}

void MultiplierGridSpec::validate() const {
    if (!(lower > 0.0) || !(upper > lower) || points < 2 || refine_iterations < 0) {
        throw ValidationError("multiplier grid: need 0 < lower < upper, points >= 2, refine_iterations >= 0");
    }
}

bool oog_feasible_freq(const AggregatedSystem& agg, double gamma, double psi, const FrequencyGrid& grid) {
    grid.validate();
    const auto t = tabulate_grams(agg.A_bar, agg.F_bar, {{agg.Cp_bar, agg.Fp_bar}, {agg.Cr_bar, agg.Fr_bar}},
                                  grid.points, Execution::Serial);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ComplexMatrix m = t[0][i] - gamma * t[1][i];
        m.diagonal().array() -= psi;
        if (max_eigenvalue_hermitian(m) > kFreqTol) return false;
    }
    return true;
}

OracleResult oog_oracle(const CertainSubsystem& sc, const UncertainSubsystem& su, const AttackBudget& budget,
                        const std::optional<FrequencyGrid>& grid, const MultiplierGridSpec& spec, Execution exec) {
    budget.validate();
    spec.validate();
    const AggregatedSystem agg = aggregate(sc, su);
    require_hurwitz(agg.A_bar, "aggregated A_bar");
    const FrequencyGrid g = grid ? *grid : FrequencyGrid::for_dynamics(agg.A_bar);
    g.validate();
    const auto t = tabulate_grams(agg.A_bar, agg.F_bar, {{agg.Cp_bar, agg.Fp_bar}, {agg.Cr_bar, agg.Fr_bar}},
                                  g.points, exec);
    const bool scalar = agg.attack_inputs() == 1;

    // For fixed gamma the smallest feasible psi is the peak eigenvalue over frequency.
    auto psi_for = [&](double gamma) {
        double peak = -kInf;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double lam = scalar ? t[0][i](0, 0).real() - gamma * t[1][i](0, 0).real()
                                      : max_eigenvalue_hermitian(t[0][i] - gamma * t[1][i]);
            peak = std::max(peak, lam - kBuildShift);
        }
        return std::max(peak, 0.0);
    };
    auto objective = [&](double gamma) {
        const double psi = psi_for(gamma);
        if (psi > spec.upper) return kInf;
        return gamma * budget.delta + psi * budget.energy;
    };

    // psi_for is convex in gamma, so the grid minimum brackets the optimum.
    const auto axis = multiplier_axis(spec);
    const auto values = evaluate_all(axis.size(), [&](std::size_t i) { return objective(axis[i]); }, exec);
    const Minimum best = refine_on_axis(objective, axis, values, spec.refine_iterations);
    OracleResult r;
    if (!std::isfinite(best.value)) return r;
    r.gamma = best.x;
    r.psi = psi_for(r.gamma);
    r.value = r.gamma * budget.delta + r.psi * budget.energy;
    return r;
}

bool proxy_feasible_freq(const CertainSubsystem& sc, double gamma_u, double gamma, double psi, double theta,
                         const FrequencyGrid& grid) {
    sc.validate();
    grid.validate();
    const ProxyTables t = proxy_tables(sc, grid, Execution::Serial);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ComplexMatrix n = proxy_kernel(t, i, gamma_u, gamma, theta);
        n.diagonal().tail(n.rows() - t.mu).array() -= psi;
        if (max_eigenvalue_hermitian(n) > kFreqTol) return false;
    }
    return true;
}

OracleResult proxy_oracle(const CertainSubsystem& sc, double gamma_u, const AttackBudget& budget,
                          const std::optional<FrequencyGrid>& grid, const MultiplierGridSpec& spec, Execution exec) {
    sc.validate();
    budget.validate();
    spec.validate();
    if (!(gamma_u >= 0.0) || !std::isfinite(gamma_u)) throw ValidationError("gamma_u must be a finite number >= 0");
    require_hurwitz(sc.A_c, "A_c");
    const FrequencyGrid g = grid ? *grid : FrequencyGrid::for_dynamics(sc.A_c);
    g.validate();
    const ProxyTables t = proxy_tables(sc, g, exec);

    // For fixed (gamma, theta) the smallest feasible psi follows from a Schur
    // complement on the u_u block at every frequency.
    auto psi_for = [&](double gamma, double theta) {
        double peak = -kInf;
        for (std::size_t i = 0; i < g.size(); ++i) {
            ComplexMatrix n = proxy_kernel(t, i, gamma_u, gamma, theta);
            n.diagonal().array() += kBuildShift;
            peak = std::max(peak, schur_threshold(n, t.mu));
            if (std::isinf(peak) && peak > 0.0) break;
        }
        return std::max(peak, 0.0);
    };
    auto objective = [&](double gamma, double theta) {
        const double psi = psi_for(gamma, theta);
        if (psi > spec.upper) return kInf;
        return gamma * budget.delta + psi * budget.energy;
    };

    // The frequency inequality is linear in (gamma, theta, psi), so the
    // objective is jointly convex and its minimum over gamma is convex in
    // theta. Minimise over gamma inside, theta outside.
    const auto axis = multiplier_axis(spec);
    auto inner = [&](double theta) {
        std::vector<double> values(axis.size());
        for (std::size_t j = 0; j < axis.size(); ++j) values[j] = objective(axis[j], theta);
        return refine_on_axis([&](double gamma) { return objective(gamma, theta); }, axis, values,
                              spec.refine_iterations);
    };
    const auto outer_values = evaluate_all(axis.size(), [&](std::size_t i) { return inner(axis[i]).value; }, exec);
    const Minimum theta_best =
        refine_on_axis([&](double theta) { return inner(theta).value; }, axis, outer_values, spec.refine_iterations);
    OracleResult r;
    if (!std::isfinite(theta_best.value)) return r;
    r.theta = theta_best.x;
    r.gamma = inner(*r.theta).x;
    r.psi = psi_for(r.gamma, *r.theta);
    r.value = r.gamma * budget.delta + r.psi * budget.energy;
    return r;
}

double hinf_sweep(const StateSpace& plant, const std::optional<FrequencyGrid>& grid, Execution exec) {
    plant.validate();
    require_hurwitz(plant.A, "plant A");
    const FrequencyGrid g = grid ? *grid : FrequencyGrid::for_dynamics(plant.A);
    g.validate();
    const auto profile = gain_profile(plant, g.points, exec);
    const auto best = argmax_finite(profile);
    if (best == profile.size()) throw StabilityError("hinf_sweep: no finite gain on the grid");
    double peak = profile[best];
    if (plant.states() == 0 || std::isinf(g.points[best])) return peak;

    // Zoom into the bracket around the maximizer.
    constexpr int kRounds = 8;
    constexpr int kPoints = 21;
    double lo = g.points[best == 0 ? 0 : best - 1];
    double hi = std::isinf(g.points[best + 1]) ? 2.0 * g.points[best] : g.points[best + 1];
    for (int r = 0; r < kRounds && hi > lo; ++r) {
        std::vector<double> w(kPoints);
        for (int i = 0; i < kPoints; ++i) w[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (kPoints - 1);
        const auto local = gain_profile(plant, w, Execution::Serial);
        const auto k = argmax_finite(local);
        peak = std::max(peak, local[k]);
        lo = w[k == 0 ? 0 : k - 1];
        hi = w[std::min<std::size_t>(k + 1, kPoints - 1)];
    }
    return peak;
}

}  // namespace oogsec
