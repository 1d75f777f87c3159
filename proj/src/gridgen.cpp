#include "oogsec/gridgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace oogsec {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Fisher-Yates prefix of length k over 0..n-1.
std::vector<int> sample_without_replacement(int n, int k, std::mt19937_64& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto span = static_cast<std::uint64_t>(n - i);
        const int j = i + static_cast<int>(rng() % span);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

std::vector<int> top_degree(const GridSpec& spec, int count) {
    const auto deg = spec.degrees();
    std::vector<int> buses = spec.certain_buses;
    std::stable_sort(buses.begin(), buses.end(), [&](int a, int b) {
        if (deg[static_cast<std::size_t>(a)] != deg[static_cast<std::size_t>(b)]) {
            return deg[static_cast<std::size_t>(a)] > deg[static_cast<std::size_t>(b)];
        }
        return a < b;
    });
    buses.resize(static_cast<std::size_t>(count));
    std::sort(buses.begin(), buses.end());
    return buses;
}

std::vector<int> draw_attack(const GridSpec& spec, int count, std::mt19937_64& rng) {
    const auto picks = sample_without_replacement(static_cast<int>(spec.certain_buses.size()), count, rng);
    std::vector<int> buses;
    for (int p : picks) buses.push_back(spec.certain_buses[static_cast<std::size_t>(p)]);
    std::sort(buses.begin(), buses.end());
    return buses;
}

void fail(const std::string& field, const std::string& what) {
    throw ValidationError("grid." + field + ": " + what);
}

// Union-find over bus indices.
struct Components {
    std::vector<int> parent;
    explicit Components(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)];
        return a;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        return true;
    }
};

}  // namespace

const char* to_string(Topology t) { return t == Topology::Ring ? "ring" : "random-geometric"; }

Topology topology_from_string(const std::string& s) {
    if (s == "ring") return Topology::Ring;
    if (s == "random-geometric") return Topology::RandomGeometric;
    throw ValidationError("unknown topology '" + s + "' (expected ring or random-geometric)");
}

std::vector<int> GridSpec::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(std::max(n_buses, 0)), 0);
    for (const auto& l : lines) {
        if (l.from >= 0 && l.from < n_buses) ++deg[static_cast<std::size_t>(l.from)];
        if (l.to >= 0 && l.to < n_buses) ++deg[static_cast<std::size_t>(l.to)];
    }
    return deg;
}

std::vector<int> GridSpec::certain_boundary() const {
    const std::set<int> unc(uncertain_buses.begin(), uncertain_buses.end());
    std::set<int> boundary;
    for (const auto& l : lines) {
        const bool fu = unc.count(l.from) > 0;
        const bool tu = unc.count(l.to) > 0;
        if (fu && !tu) boundary.insert(l.to);
        if (tu && !fu) boundary.insert(l.from);
    }
    return {boundary.begin(), boundary.end()};
}

void GridSpec::validate() const {
    if (n_buses < 2) fail("n_buses", "need at least 2 buses");
    const auto n = static_cast<std::size_t>(n_buses);
    auto check_per_bus = [&](const std::vector<double>& v, const char* name, bool allow_zero) {
        if (v.size() != n) fail(name, "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
        for (double x : v) {
            if (!std::isfinite(x) || x < 0.0 || (!allow_zero && x == 0.0)) {
                fail(name, allow_zero ? "entries must be >= 0" : "entries must be > 0");
            }
        }
    };
    check_per_bus(inertia, "inertia", false);
    check_per_bus(damping, "damping", false);
    check_per_bus(ground, "ground", true);

    std::set<std::pair<int, int>> seen;
    for (const auto& l : lines) {
        if (l.from < 0 || l.from >= n_buses || l.to < 0 || l.to >= n_buses) fail("lines", "bus index out of range");
        if (l.from == l.to) fail("lines", "self loop at bus " + std::to_string(l.from));
        if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance)) fail("lines", "susceptance must be > 0");
        if (!seen.insert({std::min(l.from, l.to), std::max(l.from, l.to)}).second) {
            fail("lines", "duplicate line " + std::to_string(l.from) + "-" + std::to_string(l.to));
        }
    }

    std::vector<int> owner(n, -1);
    auto claim = [&](const std::vector<int>& set, const char* name, int tag) {
        if (set.empty()) fail(name, "must not be empty");
        for (int b : set) {
            if (b < 0 || b >= n_buses) fail(name, "bus index " + std::to_string(b) + " out of range");
            if (owner[static_cast<std::size_t>(b)] != -1) fail(name, "bus " + std::to_string(b) + " listed twice");
            owner[static_cast<std::size_t>(b)] = tag;
        }
    };
    claim(certain_buses, "certain_buses", 0);
    claim(uncertain_buses, "uncertain_buses", 1);
    if (std::count(owner.begin(), owner.end(), -1) > 0) fail("certain_buses", "partition does not cover every bus");

    auto subset_of_certain = [&](const std::vector<int>& set, const char* name) {
        if (set.empty()) fail(name, "must not be empty");
        std::set<int> uniq;
        for (int b : set) {
            if (b < 0 || b >= n_buses || owner[static_cast<std::size_t>(b)] != 0) {
                fail(name, "bus " + std::to_string(b) + " is not a certain bus");
            }
            if (!uniq.insert(b).second) fail(name, "bus " + std::to_string(b) + " listed twice");
        }
    };
    subset_of_certain(attack_buses, "attack_buses");
    subset_of_certain(monitor_buses, "monitor_buses");

    if (certain_boundary().empty()) fail("lines", "no tie-line crosses the partition");
    auto grounded = [&](const std::vector<int>& set) {
        return std::any_of(set.begin(), set.end(), [&](int b) { return ground[static_cast<std::size_t>(b)] > 0.0; });
    };
    if (!grounded(certain_buses)) fail("ground", "no grounded bus in the certain block");
    if (!grounded(uncertain_buses)) fail("ground", "no grounded bus in the uncertain block");
}

GridSpec make_grid(const GridOptions& o) {
    if (o.n_certain < 1 || o.n_uncertain < 1) throw ValidationError("grid: need at least one certain and one uncertain bus");
    if (o.n_attack < 1 || o.n_attack > o.n_certain) throw ValidationError("grid: attack count must be in [1, n_certain]");
    if (o.n_monitor < 1 || o.n_monitor > o.n_certain) throw ValidationError("grid: monitor count must be in [1, n_certain]");
    if (!(o.inertia > 0.0) || !(o.damping > 0.0) || !(o.ground_ratio > 0.0)) {
        throw ValidationError("grid: inertia, damping and ground_ratio must be > 0");
    }

    GridSpec g;
    g.n_buses = o.n_certain + o.n_uncertain;
    g.topology = o.topology;
    g.seed = o.seed;
    const int n = g.n_buses;

    if (o.topology == Topology::Ring) {
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            if (n == 2 && i == 1) break;  // a 2-ring is a single line
            g.lines.push_back({i, j, 1.0});
        }
        for (int i = 0; i < n; ++i) (i < o.n_certain ? g.certain_buses : g.uncertain_buses).push_back(i);
    } else {
        if (!(o.radius > 0.0)) throw ValidationError("grid: radius must be > 0");
        g.radius = o.radius;
        std::mt19937_64 rng(o.seed);
        std::vector<std::array<double, 2>> pos(static_cast<std::size_t>(n));
        for (auto& p : pos) {
            p[0] = uniform01(rng);
            p[1] = uniform01(rng);
        }
        auto dist = [&](int a, int b) {
            return std::hypot(pos[static_cast<std::size_t>(a)][0] - pos[static_cast<std::size_t>(b)][0],
                              pos[static_cast<std::size_t>(a)][1] - pos[static_cast<std::size_t>(b)][1]);
        };
        auto weight = [&](double d) { return o.radius / std::max(d, o.radius / 20.0); };
        Components comp(n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double d = dist(i, j);
                if (d <= o.radius) {
                    g.lines.push_back({i, j, weight(d)});
                    comp.unite(i, j);
                }
            }
        }
        // Join components through their closest pair until connected.
        while (true) {
            double best = std::numeric_limits<double>::infinity();
            int bi = -1, bj = -1;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (comp.find(i) == comp.find(j)) continue;
                    const double d = dist(i, j);
                    if (d < best) {
                        best = d;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (bi < 0) break;
            g.lines.push_back({bi, bj, weight(best)});
            comp.unite(bi, bj);
        }
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return pos[static_cast<std::size_t>(a)][0] < pos[static_cast<std::size_t>(b)][0];
        });
        for (int k = 0; k < n; ++k) {
            (k < o.n_certain ? g.certain_buses : g.uncertain_buses).push_back(order[static_cast<std::size_t>(k)]);
        }
        std::sort(g.certain_buses.begin(), g.certain_buses.end());
        std::sort(g.uncertain_buses.begin(), g.uncertain_buses.end());
    }

    double mean_b = 0.0;
    for (const auto& l : g.lines) mean_b += l.susceptance;
    mean_b /= static_cast<double>(g.lines.size());
    g.inertia.assign(static_cast<std::size_t>(n), o.inertia);
    g.damping.assign(static_cast<std::size_t>(n), o.damping);
    g.ground.assign(static_cast<std::size_t>(n), o.ground_ratio * mean_b);
    if (o.topology == Topology::RandomGeometric) {
        if (!(o.tie_scale > 0.0)) throw ValidationError("grid: tie_scale must be > 0");
        const std::set<int> unc(g.uncertain_buses.begin(), g.uncertain_buses.end());
        for (auto& l : g.lines) {
            if (unc.count(l.from) != unc.count(l.to)) l.susceptance *= o.tie_scale;
        }
    }

    g.monitor_buses = top_degree(g, o.n_monitor);
    std::mt19937_64 rng(o.attack_seed);
    g.attack_buses = draw_attack(g, o.n_attack, rng);
    g.validate();
    return g;
}

Matrix stiffness_matrix(const GridSpec& spec) {
    const auto n = static_cast<Eigen::Index>(spec.n_buses);
    Matrix k = Matrix::Zero(n, n);
    for (const auto& l : spec.lines) {
        k(l.from, l.from) += l.susceptance;
        k(l.to, l.to) += l.susceptance;
        k(l.from, l.to) -= l.susceptance;
        k(l.to, l.from) -= l.susceptance;
    }
    for (Eigen::Index i = 0; i < n; ++i) k(i, i) += spec.ground[static_cast<std::size_t>(i)];
    return k;
}

std::pair<CertainSubsystem, UncertainSubsystem> build_partitioned_system(const GridSpec& spec) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.n_buses);
    // Local index of every bus inside its block.
    std::vector<Eigen::Index> local(n, -1);
    std::vector<bool> is_certain(n, false);
    for (std::size_t k = 0; k < spec.certain_buses.size(); ++k) {
        local[static_cast<std::size_t>(spec.certain_buses[k])] = static_cast<Eigen::Index>(k);
        is_certain[static_cast<std::size_t>(spec.certain_buses[k])] = true;
    }
    for (std::size_t k = 0; k < spec.uncertain_buses.size(); ++k) {
        local[static_cast<std::size_t>(spec.uncertain_buses[k])] = static_cast<Eigen::Index>(k);
    }
    const auto boundary = spec.certain_boundary();
    std::vector<Eigen::Index> port(n, -1);
    for (std::size_t k = 0; k < boundary.size(); ++k) port[static_cast<std::size_t>(boundary[k])] = static_cast<Eigen::Index>(k);

    const auto nc = static_cast<Eigen::Index>(spec.certain_buses.size());
    const auto nu = static_cast<Eigen::Index>(spec.uncertain_buses.size());
    const auto nb = static_cast<Eigen::Index>(boundary.size());
    const auto na = static_cast<Eigen::Index>(spec.attack_buses.size());
    const auto nm = static_cast<Eigen::Index>(spec.monitor_buses.size());

    // Block stiffness including tie-line and ground terms on the diagonal.
    Matrix kc = Matrix::Zero(nc, nc);
    Matrix ku = Matrix::Zero(nu, nu);
    Matrix bu = Matrix::Zero(2 * nu, nb);  // Sigma_u input: certain boundary angles
    Matrix cu = Matrix::Zero(nb, 2 * nu);  // Sigma_u output: tie-line torques per boundary bus
    for (const auto& l : spec.lines) {
        const auto f = static_cast<std::size_t>(l.from);
        const auto t = static_cast<std::size_t>(l.to);
        const double b = l.susceptance;
        if (is_certain[f] && is_certain[t]) {
            kc(local[f], local[f]) += b;
            kc(local[t], local[t]) += b;
            kc(local[f], local[t]) -= b;
            kc(local[t], local[f]) -= b;
        } else if (!is_certain[f] && !is_certain[t]) {
            ku(local[f], local[f]) += b;
            ku(local[t], local[t]) += b;
            ku(local[f], local[t]) -= b;
            ku(local[t], local[f]) -= b;
        } else {
            const std::size_t c = is_certain[f] ? f : t;
            const std::size_t u = is_certain[f] ? t : f;
            kc(local[c], local[c]) += b;
            ku(local[u], local[u]) += b;
            bu(nu + local[u], port[c]) += b / spec.inertia[u];
            cu(port[c], local[u]) += b;
        }
    }

    auto swing = [&](const std::vector<int>& buses, const Matrix& k) {
        const auto m = static_cast<Eigen::Index>(buses.size());
        Matrix a = Matrix::Zero(2 * m, 2 * m);
        a.topRightCorner(m, m).setIdentity();
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto bus = static_cast<std::size_t>(buses[static_cast<std::size_t>(i)]);
            const double inv_m = 1.0 / spec.inertia[bus];
            a.row(m + i).head(m) = -inv_m * k.row(i);
            a(m + i, m + i) = -spec.damping[bus] * inv_m;
            a(m + i, i) -= spec.ground[bus] * inv_m;
        }
        return a;
    };

    CertainSubsystem sc;
    sc.A_c = swing(spec.certain_buses, kc);
    sc.B_c = Matrix::Zero(2 * nc, nb);
    sc.C_c = Matrix::Zero(nb, 2 * nc);
    for (int bus : boundary) {
        const auto i = local[static_cast<std::size_t>(bus)];
        const auto p = port[static_cast<std::size_t>(bus)];
        sc.B_c(nc + i, p) = 1.0 / spec.inertia[static_cast<std::size_t>(bus)];
        sc.C_c(p, i) = 1.0;
    }
    sc.F_x = Matrix::Zero(2 * nc, na);
    for (Eigen::Index k = 0; k < na; ++k) {
        const auto bus = static_cast<std::size_t>(spec.attack_buses[static_cast<std::size_t>(k)]);
        sc.F_x(nc + local[bus], k) = 1.0 / spec.inertia[bus];
    }
    sc.C_p = Matrix::Zero(nc, 2 * nc);
    sc.C_p.rightCols(nc).setIdentity();
    sc.C_r = Matrix::Zero(2 * nm, 2 * nc);
    for (Eigen::Index k = 0; k < nm; ++k) {
        const auto i = local[static_cast<std::size_t>(spec.monitor_buses[static_cast<std::size_t>(k)])];
        sc.C_r(k, i) = 1.0;
        sc.C_r(nm + k, nc + i) = 1.0;
    }
    sc.D_p = Matrix::Zero(nc, nb);
    sc.F_p = Matrix::Zero(nc, na);
    sc.D_r = Matrix::Zero(2 * nm, nb);
    sc.F_r = Matrix::Zero(2 * nm, na);
    sc.D_c = Matrix::Zero(nb, nb);
    sc.F_c = Matrix::Zero(nb, na);

    UncertainSubsystem su{{swing(spec.uncertain_buses, ku), bu, cu, Matrix::Zero(nb, nb)}};
    return {std::move(sc), std::move(su)};
}

std::vector<GridSpec> make_scenarios(const GridSpec& base, int n_attack, int n_monitor, int n_cases,
                                     std::uint64_t seed) {
    const auto available = static_cast<int>(base.certain_buses.size());
    if (n_attack < 1 || n_attack > available) {
        throw ValidationError("scenarios: attack count " + std::to_string(n_attack) + " needs 1.." +
                              std::to_string(available) + " certain buses");
    }
    if (n_monitor < 1 || n_monitor > available) {
        throw ValidationError("scenarios: monitor count " + std::to_string(n_monitor) + " needs 1.." +
                              std::to_string(available) + " certain buses");
    }
    if (n_cases < 1) throw ValidationError("scenarios: case count must be >= 1");
    std::vector<GridSpec> out;
    out.reserve(static_cast<std::size_t>(n_cases));
    const auto monitors = top_degree(base, n_monitor);
    std::mt19937_64 rng(seed);
    for (int c = 0; c < n_cases; ++c) {
        GridSpec s = base;
        s.monitor_buses = monitors;
        s.attack_buses = draw_attack(base, n_attack, rng);
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace oogsec
