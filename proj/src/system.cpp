#include "oogsec/system.hpp"

#include <cmath>

namespace oogsec {

namespace {

constexpr double kLoopRcondFloor = 1e-12;

void check_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        throw DimensionError(std::string(name) + ": expected " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
}

}  // namespace

void CertainSubsystem::validate() const {
    const auto n = A_c.rows();
    const auto mu = B_c.cols();
    const auto ma = F_x.cols();
    const auto pp = C_p.rows();
    const auto pr = C_r.rows();
    const auto pc = C_c.rows();
    check_shape(A_c, n, n, "A_c");
    check_shape(B_c, n, mu, "B_c");
    check_shape(F_x, n, ma, "F_x");
    check_shape(C_p, pp, n, "C_p");
    check_shape(D_p, pp, mu, "D_p");
    check_shape(F_p, pp, ma, "F_p");
    check_shape(C_r, pr, n, "C_r");
    check_shape(D_r, pr, mu, "D_r");
    check_shape(F_r, pr, ma, "F_r");
    check_shape(C_c, pc, n, "C_c");
    check_shape(D_c, pc, mu, "D_c");
    check_shape(F_c, pc, ma, "F_c");
}

StateSpace CertainSubsystem::performance_map() const {
    return {A_c, hstack({&B_c, &F_x}), C_p, hstack({&D_p, &F_p})};
}

StateSpace CertainSubsystem::residual_map() const {
    return {A_c, hstack({&B_c, &F_x}), C_r, hstack({&D_r, &F_r})};
}

StateSpace CertainSubsystem::coupling_map() const {
    return {A_c, hstack({&B_c, &F_x}), C_c, hstack({&D_c, &F_c})};
}

void AttackBudget::validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw ValidationError("budget.delta must be a positive finite number");
    }
    if (!(energy > 0.0) || !std::isfinite(energy)) {
        throw ValidationError("budget.energy must be a positive finite number");
    }
}

void check_compatible(const CertainSubsystem& sc, const UncertainSubsystem& su) {
    sc.validate();
    su.validate();
    if (su.plant.inputs() != sc.coupling_outputs()) {
        throw DimensionError("uncertain subsystem input dimension " + std::to_string(su.plant.inputs()) +
                             " does not match certain coupling output dimension " +
                             std::to_string(sc.coupling_outputs()));
    }
    if (su.plant.outputs() != sc.coupling_inputs()) {
        throw DimensionError("uncertain subsystem output dimension " + std::to_string(su.plant.outputs()) +
                             " does not match certain coupling input dimension " +
                             std::to_string(sc.coupling_inputs()));
    }
}

Matrix loop_matrix(const CertainSubsystem& sc, const UncertainSubsystem& su) {
    check_compatible(sc, su);
    const auto pc = sc.coupling_outputs();
    const auto mu = sc.coupling_inputs();
    Matrix m = Matrix::Identity(pc + mu, pc + mu);
    m.block(0, pc, pc, mu) = -sc.D_c;
    m.block(pc, 0, mu, pc) = -su.plant.D;
    return m;
}

bool well_posed(const CertainSubsystem& sc, const UncertainSubsystem& su) {
    return reciprocal_condition(loop_matrix(sc, su)) > kLoopRcondFloor;
}

AggregatedSystem aggregate(const CertainSubsystem& sc, const UncertainSubsystem& su) {
    const Matrix loop = loop_matrix(sc, su);
    if (reciprocal_condition(loop) <= kLoopRcondFloor) {
        throw WellPosednessError("interconnection is not well posed: I - [[0, D_c], [D_u, 0]] is singular");
    }
    const auto& [A_u, B_u, C_u, D_u] = su.plant;
    const auto nc = sc.states();
    const auto nu = su.states();
    const auto pc = sc.coupling_outputs();
    const auto mu = sc.coupling_inputs();
    const auto ma = sc.attack_inputs();

    AggregatedSystem agg;
    agg.D_bar = loop.partialPivLu().inverse();

    // [[0, B_c], [B_u, 0]] maps (u_c, u_u) into (x_c', x_u').
    Matrix coupling_in = Matrix::Zero(nc + nu, pc + mu);
    coupling_in.block(0, pc, nc, mu) = sc.B_c;
    coupling_in.block(nc, 0, nu, pc) = B_u;

    // blkdiag(C_c, C_u): state contribution to (u_c, u_u).
    const Matrix state_out = block_diag({&sc.C_c, &C_u});
    Matrix attack_out = Matrix::Zero(pc + mu, ma);
    attack_out.topRows(pc) = sc.F_c;

    const Matrix loop_state = agg.D_bar * state_out;
    const Matrix loop_attack = agg.D_bar * attack_out;

    agg.A_bar = block_diag({&sc.A_c, &A_u}) + coupling_in * loop_state;
    agg.F_bar = Matrix::Zero(nc + nu, ma);
    agg.F_bar.topRows(nc) = sc.F_x;
    agg.F_bar += coupling_in * loop_attack;

    auto output_pair = [&](const Matrix& c, const Matrix& d, const Matrix& f, Matrix& c_bar, Matrix& f_bar) {
        Matrix d_row = Matrix::Zero(c.rows(), pc + mu);
        d_row.rightCols(mu) = d;
        c_bar = Matrix::Zero(c.rows(), nc + nu);
        c_bar.leftCols(nc) = c;
        c_bar += d_row * loop_state;
        f_bar = f + d_row * loop_attack;
    };
    output_pair(sc.C_r, sc.D_r, sc.F_r, agg.Cr_bar, agg.Fr_bar);
    output_pair(sc.C_p, sc.D_p, sc.F_p, agg.Cp_bar, agg.Fp_bar);
    return agg;
}

}  // namespace oogsec
