#include <doctest.h>

#include <cmath>

#include "oogsec/metrics.hpp"
#include "oogsec/oracle.hpp"
#include "support.hpp"

using namespace oogsec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

FrequencyGrid coarse_grid() { return FrequencyGrid::logarithmic(1e-3, 1e3, 200); }

// Scalar attack, performance, residual and coupling channels.
testing::PairShape scalar_shape(int n_c, int n_u) { return {n_c, n_u, 1, 1, 1, 1, 1, false}; }

}  // namespace

TEST_CASE("FrequencyGrid layout") {
    const auto g = FrequencyGrid::logarithmic(1e-2, 1e2, 50, {3.0, 3.0, 0.5});
    CHECK_NOTHROW(g.validate());
    CHECK(g.points.front() == 0.0);
    CHECK(g.points.back() == kInf);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.points[i] > g.points[i - 1]);
    CHECK(std::find(g.points.begin(), g.points.end(), 3.0) != g.points.end());

    const auto d = FrequencyGrid::for_dynamics(testing::second_order_plant(0.1).A);
    CHECK(d.size() >= 2002);
    const double wd = std::sqrt(1.0 - 0.01);
    bool found = false;
    for (double w : d.points) found |= std::abs(w - wd) < 1e-12;
    CHECK(found);

    FrequencyGrid bad{{0.0, 2.0, 1.0, kInf}};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    FrequencyGrid no_inf{{0.0, 1.0}};
    CHECK_THROWS_AS(no_inf.validate(), ValidationError);
    CHECK_THROWS_AS((void)FrequencyGrid::logarithmic(1.0, 0.5, 10), ValidationError);
}

TEST_CASE("OOG frequency test on the feedthrough example") {
    const auto agg = aggregate(testing::feedthrough_certain(), testing::first_order_plant());
    const auto grid = coarse_grid();
    CHECK(oog_feasible_freq(agg, 0.5, 0.5, grid));
    CHECK(oog_feasible_freq(agg, 0.3, 0.7, grid));
    CHECK_FALSE(oog_feasible_freq(agg, 0.4, 0.5, grid));
    CHECK(oog_feasible_freq(agg, 1e6, 1e6, grid));
    CHECK_FALSE(oog_feasible_freq(agg, kStrictLowerBound, kStrictLowerBound, grid));
}

TEST_CASE("OOG oracle closed forms") {
    const auto sc = testing::feedthrough_certain();
    const auto su = testing::first_order_plant();
    const auto r = oog_oracle(sc, su, {1.0, 2.0});
    REQUIRE(r.feasible());
    CHECK(std::abs(r.value - 1.0) <= 0.02);

    CertainSubsystem silent_residual = sc;
    silent_residual.F_r.setZero();
    const auto r2 = oog_oracle(silent_residual, su, {1.0, 2.0});
    REQUIRE(r2.feasible());
    CHECK(std::abs(r2.value - 2.0) <= 0.04);
}

TEST_CASE("OOG oracle agrees with the SDP on random scalar-channel systems") {
    testing::RandomSystems gen(404);
    for (int trial = 0; trial < 6; ++trial) {
        const auto [sc, su] = gen.pair(scalar_shape(2, 1 + trial % 2));
        // A cheap delta makes the residual multiplier matter.
        const AttackBudget b{trial < 3 ? 1.0 : 0.01, 1.0};
        const auto q = solve_oog(sc, su, b);
        REQUIRE(q.optimal());
        const auto o = oog_oracle(sc, su, b);
        REQUIRE(o.feasible());
        CHECK(std::abs(q.value - o.value) / o.value <= 0.03);
        // The oracle searches a subset of the feasible multipliers.
        CHECK(o.value >= q.value * (1.0 - 0.03));
    }
}

TEST_CASE("KYP consistency in both directions") {
    testing::RandomSystems gen(55);
    int active = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const auto [sc, su] = gen.pair(scalar_shape(2, 2));
        const auto agg = aggregate(sc, su);
        const auto grid = FrequencyGrid::for_dynamics(agg.A_bar);
        const auto q = solve_oog(sc, su, {0.01, 1.0});
        REQUIRE(q.optimal());
        CHECK(oog_feasible_freq(agg, q.gamma * (1 + 1e-6), *q.psi * (1 + 1e-6), grid));
        if (q.gamma > 1e-6 && *q.psi > 1e-6) {
            ++active;
            CHECK_FALSE(oog_feasible_freq(agg, 0.5 * q.gamma, 0.5 * *q.psi, grid));
        }
    }
    CHECK(active > 0);
}

TEST_CASE("proxy frequency test") {
    SUBCASE("no coupling: the u_u block only needs theta >= 0") {
        const auto sc = testing::feedthrough_certain();
        const auto grid = coarse_grid();
        CHECK(proxy_feasible_freq(sc, 0.0, 0.5, 0.5, 1e-6, grid));
        CHECK(proxy_feasible_freq(sc, 0.0, 0.5, 0.5, 1e3, grid));
        CHECK_FALSE(proxy_feasible_freq(sc, 0.0, 0.4, 0.5, 1.0, grid));
    }
    SUBCASE("theta flips feasibility at most once when u_c ignores the state") {
        testing::RandomSystems gen(9);
        auto [sc, su] = gen.pair({2, 1, 1, 1, 1, 1, 1, true});
        sc.C_c.setZero();
        sc.F_c.setZero();
        sc.D_c.setZero();
        const auto grid = coarse_grid();
        int flips = 0;
        bool last = proxy_feasible_freq(sc, 2.0, 5.0, 5.0, 1e-4, grid);
        for (int k = 1; k <= 40; ++k) {
            const bool now = proxy_feasible_freq(sc, 2.0, 5.0, 5.0, std::pow(10.0, -4.0 + 0.25 * k), grid);
            flips += now != last;
            last = now;
        }
        CHECK(flips <= 1);
    }
    SUBCASE("the SDP optimum passes the frequency test") {
        testing::RandomSystems gen(21);
        const auto [sc, su] = gen.pair(scalar_shape(2, 1));
        const double gu = gamma_u_model(su).value;
        const auto r = solve_proxy(sc, gu, {1.0, 1.0});
        REQUIRE(r.optimal());
        const auto grid = FrequencyGrid::for_dynamics(sc.A_c);
        CHECK(proxy_feasible_freq(sc, gu, r.gamma * (1 + 1e-6), *r.psi * (1 + 1e-6), *r.theta, grid));
    }
}

TEST_CASE("proxy oracle") {
    SUBCASE("decoupled closed form") {
        const auto r = proxy_oracle(testing::feedthrough_certain(), 1.0, {1.0, 2.0});
        REQUIRE(r.feasible());
        CHECK(std::abs(r.value - 1.0) <= 0.05);
        REQUIRE(r.theta.has_value());
    }
    SUBCASE("gamma_u = 0 matches the SDP") {
        testing::RandomSystems gen(61);
        const auto [sc, su] = gen.pair(scalar_shape(2, 1));
        const auto o = proxy_oracle(sc, 0.0, {1.0, 1.0});
        const auto s = solve_proxy(sc, 0.0, {1.0, 1.0});
        REQUIRE(s.optimal());
        REQUIRE(o.feasible());
        CHECK(std::abs(o.value - s.value) / s.value <= 0.05);
    }
    SUBCASE("infeasible by construction") {
        CertainSubsystem sc = testing::feedthrough_certain();
        sc.D_p.setConstant(1e4);  // huge direct path from u_u to y_p
        sc.F_c.setOnes();          // and a nonzero u_c
        sc.D_c.setZero();
        MultiplierGridSpec narrow;
        narrow.lower = 1e-4;
        narrow.upper = 1e2;
        narrow.points = 20;
        const auto o = proxy_oracle(sc, 1e3, {1.0, 1.0}, std::nullopt, narrow);
        CHECK_FALSE(o.feasible());
        CHECK(o.value == kInf);
        const auto s = solve_proxy(sc, 1e3, {1.0, 1.0});
        CHECK(s.unbounded);
    }
}

TEST_CASE("hinf_sweep analytic plants") {
    CHECK(hinf_sweep(testing::first_order_plant().plant) == doctest::Approx(1.0).epsilon(0.005));
    CHECK(hinf_sweep(StateSpace::static_gain(Matrix::Constant(1, 1, 3.0))) == 9.0);
    CHECK(hinf_sweep(testing::second_order_plant(0.1)) == doctest::Approx(25.25).epsilon(0.005));
}

TEST_CASE("hinf_sweep agrees with gamma_u_model") {
    testing::RandomSystems gen(313);
    for (int trial = 0; trial < 8; ++trial) {
        const auto p = gen.plant(1 + trial % 5, 1 + trial % 2, 1 + trial % 3);
        const auto r = gamma_u_model({p});
        REQUIRE(r.optimal());
        CHECK(std::abs(r.value - hinf_sweep(p)) / r.value <= 0.01);
    }
}

TEST_CASE("oracles give identical results serially and in parallel") {
    testing::RandomSystems gen(6);
    const auto [sc, su] = gen.pair(scalar_shape(2, 2));
    const AttackBudget b{1.0, 2.0};
    const auto a = oog_oracle(sc, su, b, std::nullopt, {}, Execution::Serial);
    const auto c = oog_oracle(sc, su, b, std::nullopt, {}, Execution::Parallel);
    CHECK(a.value == c.value);
    CHECK(a.gamma == c.gamma);
    CHECK(a.psi == c.psi);
    const auto p = testing::second_order_plant(0.2);
    CHECK(hinf_sweep(p, std::nullopt, Execution::Serial) == hinf_sweep(p, std::nullopt, Execution::Parallel));
}

TEST_CASE("multiplier grid validation") {
    MultiplierGridSpec s;
    s.points = 1;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = {};
    s.lower = 0.0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}
