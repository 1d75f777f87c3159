#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "oogsec/state_space.hpp"

namespace oogsec {

// Fixed-step RK4 of x' = A x + B u, y = C x + D u from x(0) = 0.
// input is m x N (one column per sample, spacing dt); the input is linearly
// interpolated between samples. Returns p x N outputs at the same samples.
[[nodiscard]] Matrix simulate_lti(const StateSpace& plant, const Matrix& input, double dt);

// Single-input single-output convenience overload.
[[nodiscard]] std::vector<double> simulate_lti(const StateSpace& plant, const std::vector<double>& input, double dt);

// SISO plant that can only be driven and measured. The extremum-seeking loop
// sees nothing but this interface.
class MeasuredPlant {
  public:
    explicit MeasuredPlant(StateSpace plant);

    // Advances one step with the input moving linearly from u0 to u1 and
    // returns the output at the end of the step.
    double step(double u0, double u1, double dt);
    [[nodiscard]] double output(double u) const;
    void reset();

  private:
    StateSpace plant_;
    Vector x_;
    Vector k1_, k2_, k3_, k4_, tmp_;
};

// Phase of the probing sinusoid u_c = sin(phase).
// Literal: phase = t * omega_u(t). Integrated: phase = integral of omega_u.
enum class PhaseMode { Literal, Integrated };

// Cumulative: energies over [0, t]. Discounted: exponentially weighted with
// time constant `window`.
enum class EnergyMode { Cumulative, Discounted };

[[nodiscard]] const char* to_string(PhaseMode m);
[[nodiscard]] const char* to_string(EnergyMode m);

struct EscParams {
    double omega_base = 0.7;  // omega_uo
    double alpha_p = 0.02;    // perturbation amplitude
    double omega_p = 0.05;    // perturbation frequency
    double phi_p = 0.0;       // perturbation phase
    double omega_h = 0.1;     // high-pass cutoff
    double omega_l = 0.01;    // low-pass cutoff
    double k_gain = 1.0;      // 0 disables adaptation
    double dt = 0.005;
    double horizon = 20000.0;
    double warmup = 50.0;  // zeta is frozen on [0, warmup]
    double denom_guard = 1e-9;
    PhaseMode phase = PhaseMode::Integrated;
    EnergyMode energy = EnergyMode::Cumulative;
    double window = 100.0;  // Discounted only
    int trace_stride = 100;  // record every trace_stride-th step

    // Throws ValidationError naming the offending field.
    void validate() const;
};

struct EscTrace {
    std::vector<double> t, omega_u, gamma_tilde, eta, xi, zeta, u_c, u_u, energy_uc, energy_uu;

    double final_gamma = std::numeric_limits<double>::quiet_NaN();
    double final_omega = std::numeric_limits<double>::quiet_NaN();
    // Largest gamma_tilde over every integration step with t > warmup.
    double max_gamma_after_warmup = 0.0;
    long long steps = 0;

    [[nodiscard]] std::size_t size() const { return t.size(); }
};

// Extremum-seeking estimate of the squared L2 gain of a SISO Hurwitz plant.
[[nodiscard]] EscTrace es_run(MeasuredPlant& plant, const EscParams& params);
[[nodiscard]] EscTrace es_run(const StateSpace& plant, const EscParams& params);

// Header t,omega_u,gamma_tilde,eta,xi,zeta,u_c,u_u,E_uc,E_uu then one row per sample.
void write_csv(std::ostream& os, const EscTrace& trace);

}  // namespace oogsec
