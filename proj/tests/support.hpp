#pragma once

#include <cstdint>
#include <random>

#include "oogsec/system.hpp"

namespace testing {

using namespace oogsec;

struct PairShape {
    int n_c = 3;
    int n_u = 2;
    int m_u = 1;  // Sigma_u outputs
    int m_a = 1;
    int p_p = 1;
    int p_r = 1;
    int p_c = 1;  // Sigma_u inputs
    bool feedthrough = false;  // nonzero D_c, D_u, D_p, D_r, F_c, F_p, F_r
};

// A = M - (||M||_2 + 0.5) I with M standard normal, the rest standard normal
// scaled by 1/sqrt(dim).
class RandomSystems {
  public:
    explicit RandomSystems(std::uint64_t seed) : rng_(seed) {}

    Matrix normal(Eigen::Index rows, Eigen::Index cols, double scale = 1.0);
    Matrix hurwitz(Eigen::Index n);
    StateSpace plant(int n, int inputs, int outputs, bool feedthrough = true);
    // Redraws until the pair is well posed and the closed loop is Hurwitz.
    std::pair<CertainSubsystem, UncertainSubsystem> pair(const PairShape& shape);
    std::mt19937_64& engine() { return rng_; }

  private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// y_p = a, y_r = a, decoupled from a stable scalar Sigma_u.
CertainSubsystem feedthrough_certain();
UncertainSubsystem first_order_plant(double pole = 1.0);  // 1/(s + pole)
StateSpace second_order_plant(double zeta = 0.1);          // 1/(s^2 + 2 zeta s + 1)

// |G(j w)| peak of the second-order plant, squared.
double resonant_peak_squared(double zeta);

// RK4 of the two subsystems written out separately, coupled through u_c and
// u_u; requires D_c = D_u = 0. attack is m_a x N with linear interpolation.
Matrix coupled_performance(const CertainSubsystem& sc, const UncertainSubsystem& su, const Matrix& attack,
                           double dt);

// a -> y_p of the closed loop at omega, by closing the loop between the two
// subsystem frequency responses.
ComplexMatrix closed_loop_performance(const CertainSubsystem& sc, const UncertainSubsystem& su, double omega);

}  // namespace testing
