#include "oogsec/linalg.hpp"

#include <cmath>
#include <limits>

namespace oogsec {

double max_eigenvalue(const Matrix& sym) {
    if (sym.size() == 0) return -std::numeric_limits<double>::infinity();
    if (sym.rows() == 1) return sym(0, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const Matrix& sym) {
    if (sym.size() == 0) return std::numeric_limits<double>::infinity();
    if (sym.rows() == 1) return sym(0, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double max_eigenvalue_hermitian(const ComplexMatrix& herm) {
    const auto n = herm.rows();
    if (n == 0) return -std::numeric_limits<double>::infinity();
    if (n == 1) return herm(0, 0).real();
    if (n == 2) {
        const double a = herm(0, 0).real();
        const double d = herm(1, 1).real();
        const double b2 = std::norm(herm(0, 1));
        const double half_diff = 0.5 * (a - d);
        return 0.5 * (a + d) + std::sqrt(half_diff * half_diff + b2);
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double reciprocal_condition(const Matrix& m) {
    if (m.size() == 0) return 1.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    const double largest = sv(0);
    if (!(largest > 0.0)) return 0.0;
    return sv(sv.size() - 1) / largest;
}

Matrix hstack(std::initializer_list<const Matrix*> blocks) {
    Eigen::Index rows = -1, cols = 0;
    for (const auto* b : blocks) {
        if (rows < 0) rows = b->rows();
        require(b->rows() == rows, "hstack: row count mismatch");
        cols += b->cols();
    }
    Matrix out(rows < 0 ? 0 : rows, cols);
    Eigen::Index c = 0;
    for (const auto* b : blocks) {
        out.middleCols(c, b->cols()) = *b;
        c += b->cols();
    }
    return out;
}

Matrix vstack(std::initializer_list<const Matrix*> blocks) {
    Eigen::Index cols = -1, rows = 0;
    for (const auto* b : blocks) {
        if (cols < 0) cols = b->cols();
        require(b->cols() == cols, "vstack: column count mismatch");
        rows += b->rows();
    }
    Matrix out(rows, cols < 0 ? 0 : cols);
    Eigen::Index r = 0;
    for (const auto* b : blocks) {
        out.middleRows(r, b->rows()) = *b;
        r += b->rows();
    }
    return out;
}

Matrix block_diag(std::initializer_list<const Matrix*> blocks) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto* b : blocks) {
        rows += b->rows();
        cols += b->cols();
    }
    Matrix out = Matrix::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto* b : blocks) {
        out.block(r, c, b->rows(), b->cols()) = *b;
        r += b->rows();
        c += b->cols();
    }
    return out;
}

void require(bool cond, const std::string& what) {
    if (!cond) throw DimensionError(what);
}

}  // namespace oogsec
