#include "oogsec/esc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

namespace oogsec {

namespace {

void rk4_lti(const StateSpace& p, Vector& x, const Vector& u0, const Vector& u1, double h, Vector& k1, Vector& k2,
             Vector& k3, Vector& k4, Vector& tmp) {
    const Vector um = 0.5 * (u0 + u1);
    k1.noalias() = p.A * x + p.B * u0;
    tmp = x + 0.5 * h * k1;
    k2.noalias() = p.A * tmp + p.B * um;
    tmp = x + 0.5 * h * k2;
    k3.noalias() = p.A * tmp + p.B * um;
    tmp = x + h * k3;
    k4.noalias() = p.A * tmp + p.B * u1;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("EscParams.") + field + " must be positive");
}

}  // namespace

Matrix simulate_lti(const StateSpace& plant, const Matrix& input, double dt) {
    plant.validate();
    if (!(dt > 0.0)) throw ValidationError("simulate_lti: dt must be positive");
    require(input.rows() == plant.inputs(), "simulate_lti: input rows must equal the plant input dimension");
    const auto n = plant.states();
    const auto steps = input.cols();
    Matrix y(plant.outputs(), steps);
    Vector x = Vector::Zero(n);
    Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (Eigen::Index i = 0; i < steps; ++i) {
        if (i > 0 && n > 0) rk4_lti(plant, x, input.col(i - 1), input.col(i), dt, k1, k2, k3, k4, tmp);
        y.col(i) = plant.C * x + plant.D * input.col(i);
    }
    return y;
}

std::vector<double> simulate_lti(const StateSpace& plant, const std::vector<double>& input, double dt) {
    require(plant.inputs() == 1 && plant.outputs() == 1, "simulate_lti: the vector overload needs a SISO plant");
    const Matrix u = Eigen::Map<const Eigen::RowVectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
    const Matrix y = simulate_lti(plant, u, dt);
    return {y.data(), y.data() + y.size()};
}

MeasuredPlant::MeasuredPlant(StateSpace plant) : plant_(std::move(plant)) {
    plant_.validate();
    require(plant_.inputs() == 1 && plant_.outputs() == 1, "MeasuredPlant: plant must be single-input single-output");
    const auto n = plant_.states();
    x_ = Vector::Zero(n);
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
}

double MeasuredPlant::step(double u0, double u1, double dt) {
    if (x_.size() > 0) {
        rk4_lti(plant_, x_, Vector::Constant(1, u0), Vector::Constant(1, u1), dt, k1_, k2_, k3_, k4_, tmp_);
    }
    return output(u1);
}

double MeasuredPlant::output(double u) const {
    return (plant_.C * x_)(0) + plant_.D(0, 0) * u;
}

void MeasuredPlant::reset() { x_.setZero(); }

const char* to_string(PhaseMode m) { return m == PhaseMode::Literal ? "literal" : "integrated"; }
const char* to_string(EnergyMode m) { return m == EnergyMode::Cumulative ? "cumulative" : "discounted"; }

void EscParams::validate() const {
    check_positive(omega_base, "omega_base");
    check_positive(alpha_p, "alpha_p");
    check_positive(omega_p, "omega_p");
    check_positive(omega_h, "omega_h");
    check_positive(omega_l, "omega_l");
    check_positive(dt, "dt");
    check_positive(horizon, "horizon");
    check_positive(denom_guard, "denom_guard");
    if (!std::isfinite(phi_p)) throw ValidationError("EscParams.phi_p must be finite");
    if (!(k_gain >= 0.0) || !std::isfinite(k_gain)) throw ValidationError("EscParams.k_gain must be >= 0");
    if (!(warmup >= 0.0)) throw ValidationError("EscParams.warmup must be >= 0");
    const double two_pi = 2.0 * std::numbers::pi;
    if (!(dt < two_pi / (50.0 * std::max(4.0 * omega_base, omega_p)))) {
        throw ValidationError("EscParams.dt must give at least 50 steps per period of max(4 omega_base, omega_p)");
    }
    if (!(warmup >= 5.0 * two_pi / omega_base)) {
        throw ValidationError("EscParams.warmup must cover at least 5 periods of omega_base");
    }
    if (!(horizon >= dt)) throw ValidationError("EscParams.horizon must be at least one step");
    if (energy == EnergyMode::Discounted) check_positive(window, "window");
    if (trace_stride < 1) throw ValidationError("EscParams.trace_stride must be >= 1");
}

EscTrace es_run(const StateSpace& plant, const EscParams& params) {
    if (!is_hurwitz(plant.A)) throw StabilityError("es_run: plant is not Hurwitz");
    MeasuredPlant m(plant);
    return es_run(m, params);
}

EscTrace es_run(MeasuredPlant& plant, const EscParams& p) {
    p.validate();
    plant.reset();

    const double dt = p.dt;
    const long long steps = std::llround(p.horizon / dt);
    const double decay = p.energy == EnergyMode::Discounted ? std::exp(-dt / p.window) : 1.0;

    // Controller state (eta, xi, zeta, phase).
    using State = std::array<double, 4>;
    State c{0.0, 0.0, 0.0, 0.0};
    auto chi = [&](double t) { return p.alpha_p * std::sin(p.omega_p * t + p.phi_p); };
    auto omega_u = [&](double t, const State& s) { return p.omega_base + chi(t) + s[2]; };
    auto probe = [&](double t, const State& s) {
        return p.phase == PhaseMode::Literal ? std::sin(t * omega_u(t, s)) : std::sin(s[3]);
    };

    double t = 0.0;
    double uc = probe(t, c);
    double uu = plant.output(uc);
    double e_uc = 0.0;
    double e_uu = 0.0;
    double gamma = 0.0;

    EscTrace tr;
    const auto expected = static_cast<std::size_t>(steps / p.trace_stride + 2);
    for (auto* v : {&tr.t, &tr.omega_u, &tr.gamma_tilde, &tr.eta, &tr.xi, &tr.zeta, &tr.u_c, &tr.u_u,
                    &tr.energy_uc, &tr.energy_uu}) {
        v->reserve(expected);
    }
    auto record = [&] {
        tr.t.push_back(t);
        tr.omega_u.push_back(omega_u(t, c));
        tr.gamma_tilde.push_back(gamma);
        tr.eta.push_back(c[0]);
        tr.xi.push_back(c[1]);
        tr.zeta.push_back(c[2]);
        tr.u_c.push_back(uc);
        tr.u_u.push_back(uu);
        tr.energy_uc.push_back(e_uc);
        tr.energy_uu.push_back(e_uu);
    };
    record();

    for (long long i = 1; i <= steps; ++i) {
        const double t0 = t;
        const bool adapt = t0 >= p.warmup;
        // gamma_tilde is held over the step while the filters integrate.
        auto rhs = [&](double tau, const State& s) {
            const double x = chi(tau);
            return State{p.omega_h * (gamma - s[0]), p.omega_l * (-s[1] + (gamma - s[0]) * x),
                         adapt ? p.k_gain * s[1] : 0.0, p.omega_base + x + s[2]};
        };
        auto axpy = [](const State& s, double h, const State& k) {
            return State{s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]};
        };
        const State k1 = rhs(t0, c);
        const State k2 = rhs(t0 + 0.5 * dt, axpy(c, 0.5 * dt, k1));
        const State k3 = rhs(t0 + 0.5 * dt, axpy(c, 0.5 * dt, k2));
        const State k4 = rhs(t0 + dt, axpy(c, dt, k3));
        for (std::size_t j = 0; j < 4; ++j) c[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        t = static_cast<double>(i) * dt;
        const double uc_next = probe(t, c);
        const double uu_next = plant.step(uc, uc_next, dt);
        e_uc = decay * e_uc + 0.5 * dt * (decay * uc * uc + uc_next * uc_next);
        e_uu = decay * e_uu + 0.5 * dt * (decay * uu * uu + uu_next * uu_next);
        uc = uc_next;
        uu = uu_next;
        gamma = e_uu / std::max(e_uc, p.denom_guard);
        if (t > p.warmup) tr.max_gamma_after_warmup = std::max(tr.max_gamma_after_warmup, gamma);
        if (i % p.trace_stride == 0 || i == steps) record();
    }
    tr.steps = steps;
    tr.final_gamma = gamma;
    tr.final_omega = omega_u(t, c);
    return tr;
}

void write_csv(std::ostream& os, const EscTrace& tr) {
    os << "t,omega_u,gamma_tilde,eta,xi,zeta,u_c,u_u,E_uc,E_uu\n";
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        os << tr.t[i] << ',' << tr.omega_u[i] << ',' << tr.gamma_tilde[i] << ',' << tr.eta[i] << ',' << tr.xi[i]
           << ',' << tr.zeta[i] << ',' << tr.u_c[i] << ',' << tr.u_u[i] << ',' << tr.energy_uc[i] << ','
           << tr.energy_uu[i] << '\n';
    }
    os.precision(old);
}

}  // namespace oogsec
