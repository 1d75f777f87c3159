#pragma once

#include "oogsec/linalg.hpp"
#include "oogsec/state_space.hpp"

namespace oogsec {

// The certain subsystem:
//   x_c' = A_c x_c + B_c u_u + F_x a
//   y_p  = C_p x_c + D_p u_u + F_p a     (performance)
//   y_r  = C_r x_c + D_r u_u + F_r a     (residual)
//   u_c  = C_c x_c + D_c u_u + F_c a     (signal sent to the uncertain part)
struct CertainSubsystem {
    Matrix A_c, B_c, F_x;
    Matrix C_p, D_p, F_p;
    Matrix C_r, D_r, F_r;
    Matrix C_c, D_c, F_c;

    [[nodiscard]] Eigen::Index states() const { return A_c.rows(); }
    [[nodiscard]] Eigen::Index coupling_inputs() const { return B_c.cols(); }  // m_u
    [[nodiscard]] Eigen::Index attack_inputs() const { return F_x.cols(); }    // m_a
    [[nodiscard]] Eigen::Index performance_outputs() const { return C_p.rows(); }
    [[nodiscard]] Eigen::Index residual_outputs() const { return C_r.rows(); }
    [[nodiscard]] Eigen::Index coupling_outputs() const { return C_c.rows(); }  // p_c

    void validate() const;

    // Realization from the stacked input (u_u, a) to y_p, y_r and u_c.
    [[nodiscard]] StateSpace performance_map() const;
    [[nodiscard]] StateSpace residual_map() const;
    [[nodiscard]] StateSpace coupling_map() const;
};

// u_u = Sigma_u(u_c); only its input/output behaviour is assumed known
// to the defender, the matrices are used for ground truth.
struct UncertainSubsystem {
    StateSpace plant;

    [[nodiscard]] Eigen::Index states() const { return plant.states(); }
    void validate() const { plant.validate(); }
};

// Closed loop of the two subsystems seen from the attack a.
// The coupling vector is ordered (u_c, u_u).
struct AggregatedSystem {
    Matrix A_bar, F_bar;
    Matrix Cr_bar, Fr_bar;
    Matrix Cp_bar, Fp_bar;
    Matrix D_bar;

    [[nodiscard]] Eigen::Index states() const { return A_bar.rows(); }
    [[nodiscard]] Eigen::Index attack_inputs() const { return F_bar.cols(); }

    [[nodiscard]] StateSpace performance_map() const { return {A_bar, F_bar, Cp_bar, Fp_bar}; }
    [[nodiscard]] StateSpace residual_map() const { return {A_bar, F_bar, Cr_bar, Fr_bar}; }
};

struct AttackBudget {
    double delta = 1.0;   // alarm threshold on the residual energy
    double energy = 1.0;  // bound E on the attack energy

    void validate() const;
};

// Throws DimensionError when su does not plug into sc.
void check_compatible(const CertainSubsystem& sc, const UncertainSubsystem& su);

// I - [[0, D_c], [D_u, 0]].
[[nodiscard]] Matrix loop_matrix(const CertainSubsystem& sc, const UncertainSubsystem& su);

// Reciprocal condition number of loop_matrix above 1e-12.
[[nodiscard]] bool well_posed(const CertainSubsystem& sc, const UncertainSubsystem& su);

// Closed-loop realization from a to (y_p, y_r). Throws WellPosednessError.
[[nodiscard]] AggregatedSystem aggregate(const CertainSubsystem& sc, const UncertainSubsystem& su);

}  // namespace oogsec
