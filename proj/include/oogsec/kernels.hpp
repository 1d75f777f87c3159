#pragma once

#include <cstddef>
#include <vector>

#include "oogsec/state_space.hpp"

namespace oogsec {

// Serial is the reference path; Parallel splits the loop with OpenMP and
// must return bit-identical results.
enum class Execution { Serial, Parallel };

// Output equation y = C x + D u sharing (A, B) with other maps.
struct OutputMap {
    Matrix C;
    Matrix D;
};

// For each map k and grid point i: G_k(j w_i)^H G_k(j w_i), where
// G_k = C_k (j w I - A)^{-1} B + D_k and w = +inf gives D_k^H D_k.
// Result is indexed [k][i]. Throws StabilityError on a singular resolvent.
[[nodiscard]] std::vector<std::vector<ComplexMatrix>> tabulate_grams(const Matrix& a, const Matrix& b,
                                                                     const std::vector<OutputMap>& maps,
                                                                     const std::vector<double>& omegas,
                                                                     Execution exec);

// Largest eigenvalue of G(j w_i)^H G(j w_i) per grid point.
[[nodiscard]] std::vector<double> gain_profile(const StateSpace& sys, const std::vector<double>& omegas,
                                               Execution exec);

// values[i] = f(i) for i in [0, n). f must be safe to call concurrently.
template <class F>
[[nodiscard]] std::vector<double> evaluate_all(std::size_t n, F&& f, Execution exec) {
    std::vector<double> values(n);
    const auto count = static_cast<long long>(n);
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < count; ++i) values[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } else {
        for (long long i = 0; i < count; ++i) values[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    }
    return values;
}

// Index of the smallest value, ties going to the lowest index; NaN never wins.
// Returns values.size() when no value is finite.
[[nodiscard]] std::size_t argmin_finite(const std::vector<double>& values);

// Index of the largest value, ties going to the lowest index.
[[nodiscard]] std::size_t argmax_finite(const std::vector<double>& values);

}  // namespace oogsec
