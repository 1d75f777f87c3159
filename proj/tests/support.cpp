#include "support.hpp"

#include <cmath>
#include <stdexcept>

namespace testing {

Matrix RandomSystems::normal(Eigen::Index rows, Eigen::Index cols, double scale) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * normal_(rng_);
    return m;
}

Matrix RandomSystems::hurwitz(Eigen::Index n) {
    if (n == 0) return Matrix(0, 0);
    const Matrix m = normal(n, n);
    const double norm = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
    return m - (norm + 0.5) * Matrix::Identity(n, n);
}

StateSpace RandomSystems::plant(int n, int inputs, int outputs, bool feedthrough) {
    const double s = 1.0 / std::sqrt(static_cast<double>(std::max(1, n)));
    StateSpace p;
    p.A = hurwitz(n);
    p.B = normal(n, inputs, s);
    p.C = normal(outputs, n, s);
    p.D = feedthrough ? normal(outputs, inputs, 1.0 / std::sqrt(static_cast<double>(std::max(inputs, outputs))))
                      : Matrix::Zero(outputs, inputs);
    return p;
}

std::pair<CertainSubsystem, UncertainSubsystem> RandomSystems::pair(const PairShape& sh) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double s = 1.0 / std::sqrt(static_cast<double>(sh.n_c));
        auto maybe = [&](Eigen::Index r, Eigen::Index c) {
            return sh.feedthrough ? normal(r, c, 1.0 / std::sqrt(static_cast<double>(std::max(r, c))))
                                  : Matrix::Zero(r, c);
        };
        CertainSubsystem sc;
        sc.A_c = hurwitz(sh.n_c);
        sc.B_c = normal(sh.n_c, sh.m_u, s);
        sc.F_x = normal(sh.n_c, sh.m_a, s);
        sc.C_p = normal(sh.p_p, sh.n_c, s);
        sc.D_p = maybe(sh.p_p, sh.m_u);
        sc.F_p = maybe(sh.p_p, sh.m_a);
        sc.C_r = normal(sh.p_r, sh.n_c, s);
        sc.D_r = maybe(sh.p_r, sh.m_u);
        sc.F_r = maybe(sh.p_r, sh.m_a);
        sc.C_c = normal(sh.p_c, sh.n_c, s);
        sc.D_c = maybe(sh.p_c, sh.m_u);
        sc.F_c = maybe(sh.p_c, sh.m_a);
        UncertainSubsystem su{plant(sh.n_u, sh.p_c, sh.m_u, sh.feedthrough)};
        if (!well_posed(sc, su)) continue;
        if (!is_hurwitz(aggregate(sc, su).A_bar)) continue;
        return {sc, su};
    }
    throw std::runtime_error("no stable well-posed pair drawn in 1000 attempts");
}

CertainSubsystem feedthrough_certain() {
    const Matrix z = Matrix::Zero(1, 1);
    const Matrix one = Matrix::Ones(1, 1);
    CertainSubsystem sc;
    sc.A_c = -one;
    sc.B_c = z;
    sc.F_x = z;
    sc.C_p = z;
    sc.D_p = z;
    sc.F_p = one;
    sc.C_r = z;
    sc.D_r = z;
    sc.F_r = one;
    sc.C_c = z;
    sc.D_c = z;
    sc.F_c = z;
    return sc;
}

UncertainSubsystem first_order_plant(double pole) {
    return {{Matrix::Constant(1, 1, -pole), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1)}};
}

StateSpace second_order_plant(double zeta) {
    StateSpace p{Matrix(2, 2), Matrix(2, 1), Matrix(1, 2), Matrix::Zero(1, 1)};
    p.A << 0, 1, -1, -2 * zeta;
    p.B << 0, 1;
    p.C << 1, 0;
    return p;
}

double resonant_peak_squared(double zeta) {
    const double peak = 1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta));
    return peak * peak;
}

Matrix coupled_performance(const CertainSubsystem& sc, const UncertainSubsystem& su, const Matrix& attack,
                           double dt) {
    if (sc.D_c.norm() != 0.0 || su.plant.D.norm() != 0.0) throw std::invalid_argument("requires D_c = D_u = 0");
    const auto& pu = su.plant;
    const Eigen::Index nc = sc.states();
    const Eigen::Index nu = su.states();
    const Eigen::Index steps = attack.cols();

    auto deriv = [&](const Vector& xc, const Vector& xu, const Vector& a, Vector& dxc, Vector& dxu) {
        const Vector uc = sc.C_c * xc + sc.F_c * a;
        const Vector uu = pu.C * xu;
        dxc = sc.A_c * xc + sc.B_c * uu + sc.F_x * a;
        dxu = pu.A * xu + pu.B * uc;
    };
    auto perf = [&](const Vector& xc, const Vector& xu, const Vector& a) -> Vector {
        const Vector uu = pu.C * xu;
        return sc.C_p * xc + sc.D_p * uu + sc.F_p * a;
    };

    Vector xc = Vector::Zero(nc);
    Vector xu = Vector::Zero(nu);
    Matrix y(sc.performance_outputs(), steps);
    y.col(0) = perf(xc, xu, attack.col(0));
    Vector k1c, k1u, k2c, k2u, k3c, k3u, k4c, k4u;
    for (Eigen::Index k = 0; k + 1 < steps; ++k) {
        const Vector a0 = attack.col(k);
        const Vector a1 = attack.col(k + 1);
        const Vector am = 0.5 * (a0 + a1);
        deriv(xc, xu, a0, k1c, k1u);
        deriv(xc + 0.5 * dt * k1c, xu + 0.5 * dt * k1u, am, k2c, k2u);
        deriv(xc + 0.5 * dt * k2c, xu + 0.5 * dt * k2u, am, k3c, k3u);
        deriv(xc + dt * k3c, xu + dt * k3u, a1, k4c, k4u);
        xc += dt / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c);
        xu += dt / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        y.col(k + 1) = perf(xc, xu, a1);
    }
    return y;
}

ComplexMatrix closed_loop_performance(const CertainSubsystem& sc, const UncertainSubsystem& su, double omega) {
    const ComplexMatrix rc = resolvent_times(sc.A_c, hstack({&sc.B_c, &sc.F_x}), omega);
    const Eigen::Index mu = sc.coupling_inputs();
    const Eigen::Index ma = sc.attack_inputs();
    const ComplexMatrix tp = sc.C_p.cast<Complex>() * rc + hstack({&sc.D_p, &sc.F_p}).cast<Complex>();
    const ComplexMatrix tc = sc.C_c.cast<Complex>() * rc + hstack({&sc.D_c, &sc.F_c}).cast<Complex>();
    const ComplexMatrix gu = freq_response(su.plant, omega);
    const Eigen::Index pc = sc.coupling_outputs();
    // u_c = Tc_u u_u + Tc_a a, u_u = Gu u_c
    const ComplexMatrix loop = ComplexMatrix::Identity(pc, pc) - tc.leftCols(mu) * gu;
    const ComplexMatrix uc = loop.partialPivLu().solve(tc.rightCols(ma));
    const ComplexMatrix uu = gu * uc;
    return tp.leftCols(mu) * uu + tp.rightCols(ma);
}

}  // namespace testing
