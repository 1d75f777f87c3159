#include "oogsec/state_space.hpp"

#include <cmath>

namespace oogsec {

namespace {
constexpr double kHurwitzMargin = -1e-9;
}

void StateSpace::validate() const {
    const auto n = A.rows();
    require(A.cols() == n, "StateSpace: A must be square");
    require(B.rows() == n, "StateSpace: B must have as many rows as A");
    require(C.cols() == n, "StateSpace: C must have as many columns as A");
    require(D.rows() == C.rows(), "StateSpace: D rows must match C rows");
    require(D.cols() == B.cols(), "StateSpace: D columns must match B columns");
}

StateSpace StateSpace::static_gain(const Matrix& d) {
    return StateSpace{Matrix(0, 0), Matrix(0, d.cols()), Matrix(d.rows(), 0), d};
}

bool is_hurwitz(const Matrix& a) {
    require(a.rows() == a.cols(), "is_hurwitz: matrix must be square");
    if (a.rows() == 0) return true;
    Eigen::EigenSolver<Matrix> es(a, false);
    if (es.info() != Eigen::Success) return false;
    return (es.eigenvalues().real().array() < kHurwitzMargin).all();
}

ComplexMatrix resolvent_times(const Matrix& a, const Matrix& b, double omega) {
    const auto n = a.rows();
    if (n == 0) return ComplexMatrix(0, b.cols());
    ComplexMatrix m = -a.cast<Complex>();
    m.diagonal().array() += Complex(0.0, omega);
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    // A singular pivot shows up as a non-finite solution.
    ComplexMatrix x = lu.solve(b.cast<Complex>());
    if (!x.allFinite()) {
        throw StabilityError("freq_response: singular resolvent at omega = " + std::to_string(omega));
    }
    return x;
}

ComplexMatrix freq_response(const StateSpace& sys, double omega) {
    sys.validate();
    if (std::isinf(omega) || sys.states() == 0) return sys.D.cast<Complex>();
    return sys.C.cast<Complex>() * resolvent_times(sys.A, sys.B, omega) + sys.D.cast<Complex>();
}

}  // namespace oogsec
