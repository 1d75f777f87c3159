#pragma once

#include <limits>
#include <string>
#include <vector>

#include "oogsec/linalg.hpp"

namespace oogsec::sdp {

enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

[[nodiscard]] const char* to_string(Status s);

struct ScalarVariable {
    std::string name;
    double objective = 0.0;
    double lower_bound = -std::numeric_limits<double>::infinity();
    Matrix coefficient;  // symmetric, lmi_dim x lmi_dim
};

// minimize   sum_i objective_i * s_i
// subject to constant + sum_i s_i * coefficient_i + G^T P H + H^T P G <= 0   (negative semidefinite)
//            s_i >= lower_bound_i
// over scalars s and a symmetric (possibly indefinite) P of side matrix_var_dim.
// G = left, H = right, both matrix_var_dim x lmi_dim.
struct Problem {
    Eigen::Index lmi_dim = 0;
    Matrix constant;
    std::vector<ScalarVariable> scalars;
    Eigen::Index matrix_var_dim = 0;
    Matrix left;
    Matrix right;

    void validate() const;

    [[nodiscard]] Matrix matrix_term(const Matrix& p) const;
    [[nodiscard]] Matrix lmi_value(const Vector& s, const Matrix& p) const;
    [[nodiscard]] double objective(const Vector& s) const;
    [[nodiscard]] Eigen::Index scalar_index(const std::string& name) const;
};

struct Options {
    double feasibility_tol = 1e-8;
    double gap_tol = 1e-7;
    double infeasibility_tol = 1e-8;
    int max_iterations = 200;
    double step_fraction = 0.98;
    // Accepted for residuals and gap when the iteration breaks down near the
    // optimum, provided the LMI itself holds to lmi_tol.
    double reduced_tol = 1e-6;
    double lmi_tol = 1e-7;
    // Re-solve a feasibility problem to classify a failed run as Infeasible.
    bool classify_failures = true;
};

struct Solution {
    Status status = Status::NumericalFailure;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    Vector scalar_values;
    std::vector<std::string> scalar_names;
    Matrix matrix_value;
    double max_lmi_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    double relative_gap = std::numeric_limits<double>::quiet_NaN();
    double primal_infeasibility = std::numeric_limits<double>::quiet_NaN();
    double dual_infeasibility = std::numeric_limits<double>::quiet_NaN();
    double solve_time = 0.0;
    int iterations = 0;
    // For Infeasible: a PSD matrix W, scaled so that <-constant, W> = -1, with
    // <coefficient_i, W> ~ 0 for free scalars and the matrix-variable adjoint ~ 0.
    Matrix certificate;
    std::string message;

    [[nodiscard]] double scalar(const std::string& name) const;
};

// Primal-dual interior-point method (HKM direction, Mehrotra predictor-corrector)
// on the LMI block plus a nonnegative orthant for the bounded scalars.
// Deterministic and single-threaded.
[[nodiscard]] Solution solve(const Problem& problem, const Options& options = {});

}  // namespace oogsec::sdp
