#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oogsec/system.hpp"

namespace oogsec {

enum class Topology { Ring, RandomGeometric };

[[nodiscard]] const char* to_string(Topology t);
[[nodiscard]] Topology topology_from_string(const std::string& s);

struct Line {
    int from = 0;
    int to = 0;
    double susceptance = 1.0;
};

// Linearized swing network
//   m_i theta_i'' = -d_i theta_i' - sum_j b_ij (theta_i - theta_j) - g_i theta_i + attack_i
// split into a certain and an uncertain block.
struct GridSpec {
    int n_buses = 0;
    Topology topology = Topology::Ring;
    double radius = 0.0;  // random-geometric connection radius
    std::uint64_t seed = 0;  // seed used to draw the topology
    std::vector<double> inertia;
    std::vector<double> damping;
    std::vector<double> ground;
    std::vector<Line> lines;
    std::vector<int> certain_buses;
    std::vector<int> uncertain_buses;
    std::vector<int> attack_buses;
    std::vector<int> monitor_buses;

    // Throws ValidationError naming the violated field.
    void validate() const;

    // Certain buses with at least one line into the uncertain block, ascending.
    [[nodiscard]] std::vector<int> certain_boundary() const;
    // Number of lines at each bus.
    [[nodiscard]] std::vector<int> degrees() const;
};

struct GridOptions {
    int n_certain = 20;
    int n_uncertain = 10;
    Topology topology = Topology::RandomGeometric;
    double radius = 0.35;
    std::uint64_t seed = 7;
    double inertia = 1.0;
    double damping = 0.8;
    double ground_ratio = 0.1;  // g_i = ground_ratio * mean line susceptance
    // Multiplies the susceptance of lines crossing the partition (random-geometric only).
    double tie_scale = 0.1;
    int n_attack = 2;
    int n_monitor = 2;
    std::uint64_t attack_seed = 11;
};

// Ring: buses 0..n-1 in a cycle with b = 1, the first n_certain buses are certain.
// Random-geometric: uniform positions in the unit square, lines between buses
// closer than radius with b = radius / max(distance, radius / 20), extra
// shortest lines until connected, certain block = smallest x coordinates,
// tie-lines scaled by tie_scale after the grounding is set.
// Monitors are the highest-degree certain buses, attacks are drawn with attack_seed.
[[nodiscard]] GridSpec make_grid(const GridOptions& options = {});

// Grounded stiffness matrix L + diag(g) over all buses.
[[nodiscard]] Matrix stiffness_matrix(const GridSpec& spec);

// States are (theta, theta') of the buses of each block in ascending bus order.
// u_c: angles of the certain boundary buses. u_u: for each certain boundary bus
// i, sum over its tie-lines of b_ij theta_j. y_p: theta' of every certain bus.
// y_r: (theta, theta') of the monitor buses.
[[nodiscard]] std::pair<CertainSubsystem, UncertainSubsystem> build_partitioned_system(const GridSpec& spec);

// n_cases copies of base with fixed monitors (highest degree) and attack sets
// drawn uniformly without replacement from the certain buses.
[[nodiscard]] std::vector<GridSpec> make_scenarios(const GridSpec& base, int n_attack, int n_monitor, int n_cases,
                                                   std::uint64_t seed);

}  // namespace oogsec
