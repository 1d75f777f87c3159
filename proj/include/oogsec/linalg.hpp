#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oogsec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Input has the wrong shape (row/column counts disagree).
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Algebraic loop I - [[0, D_c], [D_u, 0]] is (numerically) singular.
class WellPosednessError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A state matrix that was required to be Hurwitz is not.
class StabilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad user-facing parameter (budgets, ES parameters, grid specs, files).
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Largest eigenvalue of a symmetric matrix; -inf for the empty matrix.
double max_eigenvalue(const Matrix& sym);

// Smallest eigenvalue of a symmetric matrix; +inf for the empty matrix.
double min_eigenvalue(const Matrix& sym);

// Largest eigenvalue of a Hermitian matrix (closed form for 1x1 and 2x2).
double max_eigenvalue_hermitian(const ComplexMatrix& herm);

// sigma_min / sigma_max; 0 when singular, 1 for the empty matrix.
double reciprocal_condition(const Matrix& m);

// Row-block / column-block helpers used when assembling block matrices.
Matrix hstack(std::initializer_list<const Matrix*> blocks);
Matrix vstack(std::initializer_list<const Matrix*> blocks);
Matrix block_diag(std::initializer_list<const Matrix*> blocks);

void require(bool cond, const std::string& what);

}  // namespace oogsec
