#pragma once

#include "oogsec/linalg.hpp"

namespace oogsec {

// Continuous-time LTI realization x' = A x + B u, y = C x + D u.
// n = 0 is allowed and describes the static map y = D u.
struct StateSpace {
    Matrix A;
    Matrix B;
    Matrix C;
    Matrix D;

    [[nodiscard]] Eigen::Index states() const { return A.rows(); }
    [[nodiscard]] Eigen::Index inputs() const { return D.cols(); }
    [[nodiscard]] Eigen::Index outputs() const { return D.rows(); }

    // Throws DimensionError when (A, B, C, D) do not agree on (n, m, p).
    void validate() const;

    static StateSpace static_gain(const Matrix& d);
};

// True iff every eigenvalue of A has real part below -1e-9.
[[nodiscard]] bool is_hurwitz(const Matrix& a);

// C (j omega I - A)^{-1} B + D; omega = +inf returns D.
// Throws StabilityError when the resolvent is singular.
[[nodiscard]] ComplexMatrix freq_response(const StateSpace& sys, double omega);

// Resolvent applied to B only: (j omega I - A)^{-1} B.
[[nodiscard]] ComplexMatrix resolvent_times(const Matrix& a, const Matrix& b, double omega);

}  // namespace oogsec
