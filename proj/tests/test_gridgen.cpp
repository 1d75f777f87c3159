#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "oogsec/gridgen.hpp"
#include "oogsec/system.hpp"

using namespace oogsec;

namespace {

GridOptions two_bus_ring() {
    GridOptions o;
    o.topology = Topology::Ring;
    o.n_certain = 1;
    o.n_uncertain = 1;
    o.damping = 1.0;
    o.ground_ratio = 1.0;
    o.n_attack = 1;
    o.n_monitor = 1;
    return o;
}

bool connected(const GridSpec& g) {
    std::vector<int> parent(static_cast<std::size_t>(g.n_buses));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
        return x;
    };
    for (const auto& l : g.lines) parent[static_cast<std::size_t>(find(l.from))] = find(l.to);
    const int root = find(0);
    for (int b = 1; b < g.n_buses; ++b)
        if (find(b) != root) return false;
    return true;
}

// Free response of the aggregated grid from x0 with no attack, via RK4; returns |x(T)| / |x0|.
double free_decay_ratio(const AggregatedSystem& agg, const Vector& x0, double horizon, double dt) {
    Vector x = x0;
    const auto f = [&](const Vector& v) -> Vector { return agg.A_bar * v; };
    for (double t = 0; t < horizon; t += dt) {
        const Vector k1 = f(x), k2 = f(x + 0.5 * dt * k1), k3 = f(x + 0.5 * dt * k2), k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x.norm() / x0.norm();
}

}  // namespace

TEST_CASE("two-bus ring expands by hand") {
    const auto spec = make_grid(two_bus_ring());
    CHECK(spec.n_buses == 2);
    REQUIRE(spec.lines.size() == 1);
    CHECK(spec.lines[0].susceptance == 1.0);
    const auto [sc, su] = build_partitioned_system(spec);
    Matrix a(2, 2);
    a << 0, 1, -2, -1;
    CHECK(sc.A_c == a);
    Matrix b(2, 1);
    b << 0, 1;
    CHECK(sc.B_c == b);
    Matrix c(1, 2);
    c << 1, 0;
    CHECK(sc.C_c == c);
    CHECK(su.plant.A == a);
}

TEST_CASE("default grid: structure of the partitioned system") {
    const auto spec = make_grid();
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.n_buses == 30);
    CHECK(spec.certain_buses.size() == 20);
    CHECK(spec.uncertain_buses.size() == 10);
    CHECK(connected(spec));
    const auto [sc, su] = build_partitioned_system(spec);
    CHECK(sc.states() == 40);
    CHECK(su.states() == 20);
    CHECK(sc.D_c.isZero());
    CHECK(su.plant.D.isZero());
    CHECK(sc.F_p.isZero());
    CHECK(sc.F_r.isZero());
    CHECK(sc.F_c.isZero());
    CHECK(sc.performance_outputs() == 20);
    CHECK(sc.residual_outputs() == 2 * static_cast<Eigen::Index>(spec.monitor_buses.size()));
    CHECK(sc.coupling_outputs() == static_cast<Eigen::Index>(spec.certain_boundary().size()));
    CHECK(well_posed(sc, su));
    const auto agg = aggregate(sc, su);
    CHECK(agg.D_bar == Matrix::Identity(agg.D_bar.rows(), agg.D_bar.cols()));
    CHECK(is_hurwitz(agg.A_bar));
    CHECK(is_hurwitz(sc.A_c));
    CHECK(is_hurwitz(su.plant.A));
}

TEST_CASE("attack columns inject 1/m on the rate rows") {
    GridOptions o;
    o.inertia = 2.0;
    const auto spec = make_grid(o);
    const auto [sc, su] = build_partitioned_system(spec);
    CHECK(sc.F_x.cols() == static_cast<Eigen::Index>(spec.attack_buses.size()));
    for (Eigen::Index j = 0; j < sc.F_x.cols(); ++j) {
        CHECK(sc.F_x.col(j).sum() == doctest::Approx(0.5));
        CHECK(sc.F_x.col(j).head(sc.states() / 2).isZero());
    }
}

TEST_CASE("grounded stiffness matrix is symmetric positive definite") {
    for (const auto& opts : {GridOptions{}, two_bus_ring()}) {
        const Matrix k = stiffness_matrix(make_grid(opts));
        CHECK((k - k.transpose()).norm() == 0.0);
        CHECK(min_eigenvalue(k) > 0.0);
    }
}

TEST_CASE("shipped specs are Hurwitz and decay without attack") {
    GridOptions ring;
    ring.topology = Topology::Ring;
    for (const auto& opts : {GridOptions{}, ring}) {
        const auto spec = make_grid(opts);
        const auto [sc, su] = build_partitioned_system(spec);
        const auto agg = aggregate(sc, su);
        REQUIRE(is_hurwitz(agg.A_bar));
        Vector x0 = Vector::Zero(agg.states());
        x0(0) = 1.0;
        x0(agg.states() - 1) = -0.5;
        CHECK(free_decay_ratio(agg, x0, 400.0, 0.01) < 1e-3);
        Vector x1 = Vector::LinSpaced(agg.states(), -1.0, 1.0);
        CHECK(free_decay_ratio(agg, x1, 400.0, 0.01) < 1e-3);
    }
}

TEST_CASE("make_grid is deterministic in its seed") {
    const auto a = make_grid();
    const auto b = make_grid();
    REQUIRE(a.lines.size() == b.lines.size());
    for (std::size_t i = 0; i < a.lines.size(); ++i) {
        CHECK(a.lines[i].from == b.lines[i].from);
        CHECK(a.lines[i].to == b.lines[i].to);
        CHECK(a.lines[i].susceptance == b.lines[i].susceptance);
    }
    GridOptions other;
    other.seed = 8;
    const auto c = make_grid(other);
    bool differs = c.lines.size() != a.lines.size();
    for (std::size_t i = 0; !differs && i < a.lines.size(); ++i) differs = a.lines[i].susceptance != c.lines[i].susceptance;
    CHECK(differs);
}

TEST_CASE("GridSpec validation names the field") {
    const auto good = make_grid();
    auto g = good;
    g.attack_buses = {good.uncertain_buses.front()};
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("attack_buses"), ValidationError);
    g = good;
    g.monitor_buses.clear();
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("monitor_buses"), ValidationError);
    g = good;
    g.inertia.pop_back();
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("inertia"), ValidationError);
    g = good;
    g.uncertain_buses.push_back(good.certain_buses.front());
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("uncertain_buses"), ValidationError);
    g = good;
    const std::set<int> unc(good.uncertain_buses.begin(), good.uncertain_buses.end());
    std::erase_if(g.lines, [&](const Line& l) { return unc.count(l.from) != unc.count(l.to); });
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("tie-line"), ValidationError);
    g = good;
    for (int b : g.certain_buses) g.ground[static_cast<std::size_t>(b)] = 0.0;
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("ground"), ValidationError);
}

TEST_CASE("topology names") {
    CHECK(topology_from_string("ring") == Topology::Ring);
    CHECK(topology_from_string(to_string(Topology::RandomGeometric)) == Topology::RandomGeometric);
    CHECK_THROWS_AS((void)topology_from_string("mesh"), ValidationError);
}

TEST_CASE("make_scenarios") {
    const auto base = make_grid();
    SUBCASE("same seed twice gives identical lists") {
        const auto a = make_scenarios(base, 2, 2, 20, 2024);
        const auto b = make_scenarios(base, 2, 2, 20, 2024);
        REQUIRE(a.size() == 20);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].attack_buses == b[i].attack_buses);
            CHECK(a[i].monitor_buses == b[i].monitor_buses);
        }
    }
    SUBCASE("monitors fixed, attacks drawn from the certain block") {
        const auto s = make_scenarios(base, 4, 2, 20, 5);
        const std::set<int> certain(base.certain_buses.begin(), base.certain_buses.end());
        for (const auto& spec : s) {
            CHECK(spec.monitor_buses == s.front().monitor_buses);
            CHECK(spec.attack_buses.size() == 4);
            for (int b : spec.attack_buses) CHECK(certain.count(b) == 1);
            CHECK(spec.lines.size() == base.lines.size());
        }
        // Monitors are the highest-degree certain buses.
        const auto deg = base.degrees();
        int min_monitor_degree = 1 << 30;
        for (int m : s.front().monitor_buses) min_monitor_degree = std::min(min_monitor_degree, deg[static_cast<std::size_t>(m)]);
        for (int b : base.certain_buses) {
            const bool is_monitor = std::count(s.front().monitor_buses.begin(), s.front().monitor_buses.end(), b) > 0;
            if (!is_monitor) CHECK(deg[static_cast<std::size_t>(b)] <= min_monitor_degree);
        }
    }
    SUBCASE("full attack set") {
        for (const auto& spec : make_scenarios(base, 20, 2, 5, 1)) {
            std::vector<int> sorted = spec.attack_buses;
            std::sort(sorted.begin(), sorted.end());
            std::vector<int> certain = base.certain_buses;
            std::sort(certain.begin(), certain.end());
            CHECK(sorted == certain);
        }
    }
    SUBCASE("distinct draws for the benchmark seed") {
        std::set<std::vector<int>> distinct;
        for (const auto& spec : make_scenarios(base, 2, 2, 20, 2024)) {
            auto a = spec.attack_buses;
            std::sort(a.begin(), a.end());
            distinct.insert(a);
        }
        CHECK(distinct.size() >= 15);
        CHECK(distinct.size() == 20);
    }
    CHECK_THROWS_AS((void)make_scenarios(base, 21, 2, 5, 1), ValidationError);
    CHECK_THROWS_AS((void)make_scenarios(base, 2, 0, 5, 1), ValidationError);
}
