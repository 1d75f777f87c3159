#include "oogsec/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace oogsec {

const char* to_string(MetricKind k) {
    switch (k) {
        case MetricKind::OutputToOutputGain: return "Q";
        case MetricKind::ProxyGain: return "Q_hat";
        case MetricKind::UncertainGain: return "gamma_u";
    }
    return "unknown";
}

namespace {

Matrix gram(const Matrix& m) { return m.transpose() * m; }

// blkdiag(0, ..., I, ..., 0) with the identity on [offset, offset + size).
Matrix channel_selector(Eigen::Index dim, Eigen::Index offset, Eigen::Index size) {
    Matrix s = Matrix::Zero(dim, dim);
    s.block(offset, offset, size, size).setIdentity();
    return s;
}

MetricResult package(MetricKind kind, const sdp::Solution& sol) {
    MetricResult r;
    r.kind = kind;
    r.status = sol.status;
    r.solve_time = sol.solve_time;
    r.iterations = sol.iterations;
    r.max_lmi_eigenvalue = sol.max_lmi_eigenvalue;
    r.relative_gap = sol.relative_gap;
    if (sol.status == sdp::Status::Infeasible) {
        r.unbounded = true;
        r.value = std::numeric_limits<double>::infinity();
        return r;
    }
    if (sol.status != sdp::Status::Optimal) return r;
    r.value = sol.objective_value;
    r.certificate = sol.matrix_value;
    if (kind == MetricKind::UncertainGain) {
        r.gamma = sol.scalar("gamma_u");
        return r;
    }
    r.gamma = sol.scalar("gamma");
    r.psi = sol.scalar("psi");
    if (kind == MetricKind::ProxyGain) r.theta = sol.scalar("theta");
    return r;
}

}  // namespace

sdp::Problem build_oog_lmi(const AggregatedSystem& agg, const AttackBudget& budget) {
    budget.validate();
    if (!is_hurwitz(agg.A_bar)) {
        throw StabilityError("aggregated closed loop is not Hurwitz; the worst-case impact is undefined");
    }
    const auto n = agg.states();
    const auto ma = agg.attack_inputs();
    const auto q = n + ma;

    sdp::Problem p;
    p.lmi_dim = q;
    p.constant = gram(hstack({&agg.Cp_bar, &agg.Fp_bar}));
    p.scalars.push_back({"gamma", budget.delta, kStrictLowerBound, -gram(hstack({&agg.Cr_bar, &agg.Fr_bar}))});
    p.scalars.push_back({"psi", budget.energy, kStrictLowerBound, -channel_selector(q, n, ma)});
    p.matrix_var_dim = n;
    p.left = Matrix::Zero(n, q);
    p.left.leftCols(n).setIdentity();
    p.right = hstack({&agg.A_bar, &agg.F_bar});
    return p;
}

MetricResult solve_oog(const CertainSubsystem& sc, const UncertainSubsystem& su, const AttackBudget& budget,
                       const sdp::Options& options) {
    const AggregatedSystem agg = aggregate(sc, su);
    return package(MetricKind::OutputToOutputGain, sdp::solve(build_oog_lmi(agg, budget), options));
}

sdp::Problem build_proxy_lmi(const CertainSubsystem& sc, double gamma_u, const AttackBudget& budget) {
    sc.validate();
    budget.validate();
    if (!(gamma_u >= 0.0) || !std::isfinite(gamma_u)) throw ValidationError("gamma_u must be a finite number >= 0");
    if (!is_hurwitz(sc.A_c)) throw StabilityError("A_c is not Hurwitz");
    const auto n = sc.states();
    const auto mu = sc.coupling_inputs();
    const auto ma = sc.attack_inputs();
    const auto q = n + mu + ma;

    sdp::Problem p;
    p.lmi_dim = q;
    p.constant = gram(hstack({&sc.C_p, &sc.D_p, &sc.F_p}));
    p.scalars.push_back({"gamma", budget.delta, kStrictLowerBound, -gram(hstack({&sc.C_r, &sc.D_r, &sc.F_r}))});
    p.scalars.push_back({"psi", budget.energy, kStrictLowerBound, -channel_selector(q, n + mu, ma)});
    p.scalars.push_back({"theta", 0.0, kStrictLowerBound,
                         gamma_u * gram(hstack({&sc.C_c, &sc.D_c, &sc.F_c})) - channel_selector(q, n, mu)});
    p.matrix_var_dim = n;
    p.left = Matrix::Zero(n, q);
    p.left.leftCols(n).setIdentity();
    p.right = hstack({&sc.A_c, &sc.B_c, &sc.F_x});
    return p;
}

MetricResult solve_proxy(const CertainSubsystem& sc, double gamma_u, const AttackBudget& budget,
                         const sdp::Options& options) {
    return package(MetricKind::ProxyGain, sdp::solve(build_proxy_lmi(sc, gamma_u, budget), options));
}

sdp::Problem build_gamma_u_lmi(const StateSpace& plant) {
    plant.validate();
    if (!is_hurwitz(plant.A)) throw StabilityError("A_u is not Hurwitz");
    const auto n = plant.states();
    const auto m = plant.inputs();
    const auto q = n + m;

    sdp::Problem p;
    p.lmi_dim = q;
    p.constant = gram(hstack({&plant.C, &plant.D}));
    p.scalars.push_back({"gamma_u", 1.0, kStrictLowerBound, -channel_selector(q, n, m)});
    p.matrix_var_dim = n;
    p.left = Matrix::Zero(n, q);
    p.left.leftCols(n).setIdentity();
    p.right = hstack({&plant.A, &plant.B});
    return p;
}

MetricResult gamma_u_model(const UncertainSubsystem& su, const sdp::Options& options) {
    return package(MetricKind::UncertainGain, sdp::solve(build_gamma_u_lmi(su.plant), options));
}

UpperBoundReport check_upper_bound(const MetricResult& q, const MetricResult& q_hat) {
    UpperBoundReport rep;
    rep.q = q;
    rep.q_hat = q_hat;
    rep.evaluated = q.usable() && q_hat.usable();
    if (!rep.evaluated) return rep;
    if (q_hat.unbounded) {
        rep.holds = true;
        rep.gap = std::numeric_limits<double>::infinity();
        return rep;
    }
    if (q.unbounded) {
        rep.holds = false;
        rep.gap = -std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.holds = q.value <= q_hat.value * (1.0 + 1e-6) + 1e-9;
    rep.gap = (q_hat.value - q.value) / std::max(q.value, 1e-12);
    return rep;
}

UpperBoundReport verify_upper_bound(const CertainSubsystem& sc, const UncertainSubsystem& su,
                                    const AttackBudget& budget, const sdp::Options& options) {
    const MetricResult q = solve_oog(sc, su, budget, options);
    const MetricResult gu = gamma_u_model(su, options);
    if (!gu.optimal()) {
        UpperBoundReport rep;
        rep.q = q;
        return rep;
    }
    UpperBoundReport rep = check_upper_bound(q, solve_proxy(sc, gu.value, budget, options));
    rep.gamma_u = gu.value;
    return rep;
}

}  // namespace oogsec
