#include <doctest.h>

#include <array>
#include <cmath>

#include "oogsec/metrics.hpp"
#include "support.hpp"

using namespace oogsec;

namespace {

void check_certificate(const sdp::Problem& p, const MetricResult& r) {
    REQUIRE(r.optimal());
    Vector s(static_cast<Eigen::Index>(p.scalars.size()));
    s(0) = r.gamma;
    if (p.scalars.size() > 1) s(1) = *r.psi;
    if (p.scalars.size() > 2) s(2) = *r.theta;
    CHECK(max_eigenvalue(p.lmi_value(s, r.certificate)) <= 1e-7);
}

void check_value_identity(const MetricResult& r, const AttackBudget& b) {
    REQUIRE(r.optimal());
    const double objective = r.gamma * b.delta + *r.psi * b.energy;
    CHECK(std::abs(r.value - objective) <= 1e-9 * std::max(1.0, std::abs(r.value)));
}

// Certain subsystem whose coupling channels vanish.
CertainSubsystem decoupled() { return testing::feedthrough_certain(); }

}  // namespace

TEST_CASE("OOG LMI dimensions") {
    CertainSubsystem sc = testing::feedthrough_certain();
    const auto agg = aggregate(sc, testing::first_order_plant());
    const auto p = build_oog_lmi(agg, {1.0, 1.0});
    CHECK(p.lmi_dim == 3);
    CHECK(p.matrix_var_dim == 2);
    CHECK(p.scalars.size() == 2);
}

TEST_CASE("zero performance output: epsilon multipliers with P = 0 are feasible") {
    CertainSubsystem sc = testing::feedthrough_certain();
    sc.F_p.setZero();
    const auto agg = aggregate(sc, testing::first_order_plant());
    const auto p = build_oog_lmi(agg, {1.0, 1.0});
    CHECK(p.constant.isZero());
    Vector s = Vector::Constant(2, kStrictLowerBound);
    CHECK(max_eigenvalue(p.lmi_value(s, Matrix::Zero(2, 2))) <= 0.0);
    const auto r = solve_oog(sc, testing::first_order_plant(), {1.0, 1.0});
    REQUIRE(r.optimal());
    CHECK(r.value <= 1e-6);
}

TEST_CASE("OOG rejects an unstable closed loop") {
    CertainSubsystem sc = testing::feedthrough_certain();
    sc.A_c.setConstant(0.5);
    CHECK_THROWS_AS((void)solve_oog(sc, testing::first_order_plant(), {1.0, 1.0}), StabilityError);
}

TEST_CASE("feedthrough-only attack gives min(delta, E)") {
    const auto sc = testing::feedthrough_certain();
    const auto su = testing::first_order_plant(2.0);
    for (const auto& [d, e] : std::array<std::pair<double, double>, 3>{{{1, 2}, {3, 2}, {2, 2}}}) {
        const AttackBudget b{d, e};
        const auto r = solve_oog(sc, su, b);
        REQUIRE(r.optimal());
        CHECK(r.value == doctest::Approx(std::min(d, e)).epsilon(1e-6));
        CHECK(r.kind == MetricKind::OutputToOutputGain);
        check_value_identity(r, b);
        check_certificate(build_oog_lmi(aggregate(sc, su), b), r);
    }
}

TEST_CASE("no residual output gives Q = E") {
    CertainSubsystem sc = testing::feedthrough_certain();
    sc.F_r.setZero();
    const auto r = solve_oog(sc, testing::first_order_plant(), {1.0, 2.0});
    REQUIRE(r.optimal());
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(*r.psi == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.gamma <= 1e-6);
}

TEST_CASE("proxy LMI structure") {
    testing::RandomSystems gen(12);
    const auto [sc, su] = gen.pair({3, 2, 2, 1, 1, 1, 1, true});
    const auto p = build_proxy_lmi(sc, 1.5, {1.0, 1.0});
    CHECK(p.lmi_dim == 3 + 2 + 1);
    CHECK(p.matrix_var_dim == 3);

    SUBCASE("gamma_u = 0 leaves theta as a pure u_u penalty") {
        const auto p0 = build_proxy_lmi(sc, 0.0, {1.0, 1.0});
        Matrix expected = Matrix::Zero(6, 6);
        expected.block(3, 3, 2, 2) = -Matrix::Identity(2, 2);
        CHECK(p0.scalars[2].coefficient == expected);
    }
    SUBCASE("raising gamma_u never lowers the top eigenvalue") {
        Vector s(3);
        s << 0.7, 1.3, 0.4;
        const Matrix pc = gen.normal(3, 3);
        const Matrix pcs = symmetrize(pc);
        double last = -std::numeric_limits<double>::infinity();
        for (double gu : {0.0, 0.5, 1.0, 4.0, 16.0}) {
            const double top = max_eigenvalue(build_proxy_lmi(sc, gu, {1.0, 1.0}).lmi_value(s, pcs));
            CHECK(top >= last - 1e-12);
            last = top;
        }
    }
    CHECK_THROWS_AS((void)build_proxy_lmi(sc, -1.0, {1.0, 1.0}), ValidationError);
}

TEST_CASE("decoupled certain subsystem: proxy equals the closed form") {
    const auto sc = decoupled();
    const AttackBudget b{1.0, 2.0};
    for (double gu : {0.1, 1.0, 25.0}) {
        const auto r = solve_proxy(sc, gu, b);
        REQUIRE(r.optimal());
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(r.kind == MetricKind::ProxyGain);
        REQUIRE(r.theta.has_value());
        check_value_identity(r, b);
        check_certificate(build_proxy_lmi(sc, gu, b), r);
    }
    const auto q = solve_oog(sc, testing::first_order_plant(3.0), b);
    REQUIRE(q.optimal());
    const auto rep = check_upper_bound(q, solve_proxy(sc, 2.0, b));
    CHECK(rep.holds);
    CHECK(std::abs(rep.gap) <= 1e-6);
}

TEST_CASE("gamma_u = 0 proxy equals the ground truth with u_u forced to zero") {
    testing::RandomSystems gen(41);
    for (int trial = 0; trial < 3; ++trial) {
        const auto [sc, su] = gen.pair({3, 2, 1, 1, 1, 1, 1, true});
        const UncertainSubsystem silent{StateSpace::static_gain(Matrix::Zero(1, 1))};
        const AttackBudget b{1.0, 1.5};
        const auto q0 = solve_oog(sc, silent, b);
        const auto qh = solve_proxy(sc, 0.0, b);
        REQUIRE(q0.optimal());
        REQUIRE(qh.optimal());
        CHECK(qh.value == doctest::Approx(q0.value).epsilon(1e-5));
    }
}

TEST_CASE("gamma_u_model analytic plants") {
    SUBCASE("static gain") {
        for (double k : {0.5, 2.0, -3.0}) {
            const auto r = gamma_u_model({StateSpace::static_gain(Matrix::Constant(1, 1, k))});
            REQUIRE(r.optimal());
            CHECK(r.value == doctest::Approx(k * k).epsilon(1e-6));
            CHECK_FALSE(r.psi.has_value());
            CHECK_FALSE(r.theta.has_value());
        }
    }
    SUBCASE("first order") {
        const auto r = gamma_u_model(testing::first_order_plant());
        REQUIRE(r.optimal());
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("lightly damped second order") {
        const auto r = gamma_u_model({testing::second_order_plant(0.1)});
        REQUIRE(r.optimal());
        CHECK(r.value == doctest::Approx(testing::resonant_peak_squared(0.1)).epsilon(1e-5));
        CHECK(r.value == doctest::Approx(25.25).epsilon(1e-3));
        check_certificate(build_gamma_u_lmi(testing::second_order_plant(0.1)), r);
    }
    CHECK_THROWS_AS((void)gamma_u_model({{Matrix::Constant(1, 1, 1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                                           Matrix::Zero(1, 1)}}),
                    StabilityError);
}

TEST_CASE("upper bound on random pairs") {
    testing::RandomSystems gen(2024);
    int evaluated = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const auto [sc, su] = gen.pair({3, 2, 1, 1, 1, 1, 1, trial % 2 == 0});
        const auto rep = verify_upper_bound(sc, su, {1.0, 1.0});
        REQUIRE(rep.evaluated);
        CHECK(rep.holds);
        ++evaluated;
        if (rep.q.optimal()) check_certificate(build_oog_lmi(aggregate(sc, su), {1.0, 1.0}), rep.q);
        if (rep.q_hat.optimal()) check_certificate(build_proxy_lmi(sc, rep.gamma_u, {1.0, 1.0}), rep.q_hat);
    }
    CHECK(evaluated == 12);
}

TEST_CASE("check_upper_bound edge cases") {
    MetricResult q;
    q.status = sdp::Status::Optimal;
    q.value = 2.0;
    MetricResult qh;
    qh.status = sdp::Status::Infeasible;
    qh.unbounded = true;
    qh.value = std::numeric_limits<double>::infinity();
    auto rep = check_upper_bound(q, qh);
    CHECK(rep.evaluated);
    CHECK(rep.holds);

    qh.status = sdp::Status::Optimal;
    qh.unbounded = false;
    qh.value = 1.0;
    rep = check_upper_bound(q, qh);
    CHECK_FALSE(rep.holds);
    CHECK(rep.gap == doctest::Approx(-0.5));

    qh.status = sdp::Status::NumericalFailure;
    CHECK_FALSE(check_upper_bound(q, qh).evaluated);
}

TEST_CASE("budget and gain monotonicity") {
    testing::RandomSystems gen(77);
    const auto [sc, su] = gen.pair({3, 2, 1, 1, 1, 1, 1, false});
    const double g = gamma_u_model(su).value;
    const std::array<double, 3> deltas{0.5, 1.0, 2.0};
    const std::array<double, 3> energies{1.0, 2.0, 4.0};
    const double tol = 1e-6;
    double q[3][3], qh[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const AttackBudget b{deltas[static_cast<std::size_t>(i)], energies[static_cast<std::size_t>(j)]};
            const auto a = solve_oog(sc, su, b);
            const auto h = solve_proxy(sc, g, b);
            REQUIRE(a.optimal());
            REQUIRE(h.usable());
            q[i][j] = a.value;
            qh[i][j] = h.value;
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i > 0) {
                CHECK(q[i][j] >= q[i - 1][j] * (1 - tol));
                CHECK(qh[i][j] >= qh[i - 1][j] * (1 - tol));
            }
            if (j > 0) {
                CHECK(q[i][j] >= q[i][j - 1] * (1 - tol));
                CHECK(qh[i][j] >= qh[i][j - 1] * (1 - tol));
            }
        }
    double last = 0.0;
    for (double scale : {0.5, 1.0, 2.0}) {
        const auto h = solve_proxy(sc, scale * g, {1.0, 1.0});
        REQUIRE(h.usable());
        CHECK(h.value >= last * (1 - tol));
        last = h.value;
    }
}

TEST_CASE("metric names") {
    CHECK(std::string(to_string(MetricKind::OutputToOutputGain)) == "Q");
    CHECK(std::string(to_string(MetricKind::ProxyGain)) == "Q_hat");
    CHECK(std::string(to_string(MetricKind::UncertainGain)) == "gamma_u");
}
