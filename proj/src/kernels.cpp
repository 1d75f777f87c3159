#include "oogsec/kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace oogsec {

namespace {

void gram_row(const Matrix& a, const Matrix& b, const std::vector<OutputMap>& maps, double omega,
              std::vector<std::vector<ComplexMatrix>>& out, std::size_t i) {
    if (std::isinf(omega) || a.rows() == 0) {
        for (std::size_t k = 0; k < maps.size(); ++k) {
            const ComplexMatrix g = maps[k].D.cast<Complex>();
            out[k][i] = g.adjoint() * g;
        }
        return;
    }
    const ComplexMatrix x = resolvent_times(a, b, omega);
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const ComplexMatrix g = maps[k].C.cast<Complex>() * x + maps[k].D.cast<Complex>();
        out[k][i] = g.adjoint() * g;
    }
}

}  // namespace

std::vector<std::vector<ComplexMatrix>> tabulate_grams(const Matrix& a, const Matrix& b,
                                                       const std::vector<OutputMap>& maps,
                                                       const std::vector<double>& omegas, Execution exec) {
    for (const auto& m : maps) {
        require(m.C.cols() == a.rows() && m.D.cols() == b.cols() && m.C.rows() == m.D.rows(),
                "tabulate_grams: output map does not match (A, B)");
    }
    std::vector<std::vector<ComplexMatrix>> out(maps.size(), std::vector<ComplexMatrix>(omegas.size()));
    const auto count = static_cast<long long>(omegas.size());
    if (exec == Execution::Serial) {
        for (long long i = 0; i < count; ++i) gram_row(a, b, maps, omegas[i], out, static_cast<std::size_t>(i));
        return out;
    }
    // Exceptions cannot cross the parallel region; remember the first bad point.
    std::atomic<long long> failed{-1};
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) {
        try {
            gram_row(a, b, maps, omegas[i], out, static_cast<std::size_t>(i));
        } catch (const StabilityError&) {
            long long expected = -1;
            failed.compare_exchange_strong(expected, i);
        }
    }
    if (failed.load() >= 0) {
        throw StabilityError("tabulate_grams: singular resolvent at omega = " +
                             std::to_string(omegas[static_cast<std::size_t>(failed.load())]));
    }
    return out;
}

std::vector<double> gain_profile(const StateSpace& sys, const std::vector<double>& omegas, Execution exec) {
    sys.validate();
    const auto grams = tabulate_grams(sys.A, sys.B, {{sys.C, sys.D}}, omegas, exec);
    return evaluate_all(omegas.size(), [&](std::size_t i) { return max_eigenvalue_hermitian(grams[0][i]); }, exec);
}

std::size_t argmin_finite(const std::vector<double>& values) {
    std::size_t best = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) continue;
        if (best == values.size() || values[i] < values[best]) best = i;
    }
    return best;
}

std::size_t argmax_finite(const std::vector<double>& values) {
    std::size_t best = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) continue;
        if (best == values.size() || values[i] > values[best]) best = i;
    }
    return best;
}

}  // namespace oogsec
