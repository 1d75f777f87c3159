// Command-line front end: oog, proxy, gamma-model, gamma-esc, gen-grid, bench.
// Exit codes: 0 success, 1 unexpected error, 2 invalid input, 3 solver NumericalFailure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oogsec/bench.hpp"
#include "oogsec/esc.hpp"
#include "oogsec/gridgen.hpp"
#include "oogsec/io.hpp"
#include "oogsec/metrics.hpp"
#include "oogsec/oracle.hpp"

namespace {

using namespace oogsec;
using io::Json;

constexpr int kOk = 0;
constexpr int kUnexpected = 1;
constexpr int kInvalid = 2;
constexpr int kNumerical = 3;

struct Common {
    std::string system;
    std::string out;
    std::optional<double> delta;
    std::optional<double> energy;
    bool verify = false;
    std::optional<double> feas_tol;
    std::optional<double> gap_tol;
    std::optional<int> max_iter;

    [[nodiscard]] sdp::Options solver() const {
        sdp::Options o;
        if (feas_tol) o.feasibility_tol = o.infeasibility_tol = *feas_tol;
        if (gap_tol) o.gap_tol = *gap_tol;
        if (max_iter) o.max_iterations = *max_iter;
        return o;
    }
};

void add_solver_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--feas-tol", c.feas_tol, "SDP feasibility tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--gap-tol", c.gap_tol, "SDP relative gap tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", c.max_iter, "SDP iteration limit")->check(CLI::PositiveNumber);
}

void add_budget_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--delta", c.delta, "alarm threshold on the residual energy (overrides the file)");
    cmd->add_option("--energy", c.energy, "attack energy bound E (overrides the file)");
}

// Writes to --out when given, otherwise prints the JSON in place of the summary.
void emit(const Common& c, const Json& result, const std::string& summary) {
    if (c.out.empty()) {
        std::cout << result.dump(2) << '\n';
        return;
    }
    io::write_json(c.out, result);
    std::cout << summary;
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

double relative_deviation(double value, double reference) {
    if (std::isinf(value) && std::isinf(reference)) return 0.0;
    return std::abs(value - reference) / std::max(std::abs(reference), 1e-12);
}

int status_code(const MetricResult& r) { return r.status == sdp::Status::NumericalFailure ? kNumerical : kOk; }

const CertainSubsystem& need_certain(const io::SystemFile& f, const std::string& path) {
    if (!f.certain) throw ValidationError(path + ": certain: block missing");
    return *f.certain;
}

const UncertainSubsystem& need_uncertain(const io::SystemFile& f, const std::string& path) {
    if (!f.uncertain) throw ValidationError(path + ": uncertain: block missing");
    return *f.uncertain;
}

std::string metric_line(const MetricResult& r) {
    std::string s = std::string(to_string(r.kind)) + " = " + fmt(r.value) + "  (" + sdp::to_string(r.status);
    if (r.unbounded) s += ", unbounded";
    return s + ", " + std::to_string(r.iterations) + " iterations)\n";
}

int run_oog(const Common& c) {
    const auto file = io::load_system(c.system);
    const auto& sc = need_certain(file, c.system);
    const auto& su = need_uncertain(file, c.system);
    const auto budget = io::resolve_budget(file, c.delta, c.energy);
    const auto r = solve_oog(sc, su, budget, c.solver());
    Json result = io::metric_to_json(r);
    result["budget"] = {{"delta", budget.delta}, {"energy", budget.energy}};
    std::string summary = metric_line(r);
    if (c.verify) {
        const auto o = oog_oracle(sc, su, budget);
        const double dev = relative_deviation(r.value, o.value);
        result["oracle"] = {{"value", std::isfinite(o.value) ? Json(o.value) : Json(nullptr)},
                            {"relative_deviation", dev}};
        summary += "oracle = " + fmt(o.value) + ", relative deviation " + fmt(dev) + "\n";
    }
    emit(c, result, summary);
    return status_code(r);
}

int run_proxy(const Common& c, std::optional<double> gamma_u_flag) {
    const auto file = io::load_system(c.system);
    const auto& sc = need_certain(file, c.system);
    const auto budget = io::resolve_budget(file, c.delta, c.energy);
    double gamma_u = 0.0;
    std::optional<MetricResult> gu;
    if (gamma_u_flag) {
        gamma_u = *gamma_u_flag;
        if (!(gamma_u > 0.0) || !std::isfinite(gamma_u)) throw ValidationError("--gamma-u: must be positive");
    } else {
        if (!file.uncertain) {
            throw ValidationError("--gamma-u: not given and " + c.system + " has no uncertain block");
        }
        gu = gamma_u_model(*file.uncertain, c.solver());
        if (!gu->optimal()) {
            std::cerr << "error: gamma_u solve ended " << sdp::to_string(gu->status) << '\n';
            return kNumerical;
        }
        gamma_u = gu->value;
    }
    const auto r = solve_proxy(sc, gamma_u, budget, c.solver());
    Json result = io::metric_to_json(r);
    result["budget"] = {{"delta", budget.delta}, {"energy", budget.energy}};
    result["gamma_u"] = gamma_u;
    result["gamma_u_source"] = gu ? "model" : "flag";
    std::string summary = "gamma_u = " + fmt(gamma_u) + (gu ? " (model)\n" : " (flag)\n") + metric_line(r);
    if (c.verify) {
        const auto o = proxy_oracle(sc, gamma_u, budget);
        const double dev = relative_deviation(r.value, o.value);
        result["oracle"] = {{"value", std::isfinite(o.value) ? Json(o.value) : Json(nullptr)},
                            {"relative_deviation", dev}};
        summary += "oracle = " + fmt(o.value) + ", relative deviation " + fmt(dev) + "\n";
    }
    emit(c, result, summary);
    return status_code(r);
}

int run_gamma_model(const Common& c) {
    const auto file = io::load_system(c.system);
    const auto& su = need_uncertain(file, c.system);
    const auto r = gamma_u_model(su, c.solver());
    Json result = io::metric_to_json(r);
    std::string summary = metric_line(r);
    if (c.verify) {
        const double sweep = hinf_sweep(su.plant);
        const double dev = relative_deviation(r.value, sweep);
        result["oracle"] = {{"value", sweep}, {"relative_deviation", dev}};
        summary += "frequency sweep = " + fmt(sweep) + ", relative deviation " + fmt(dev) + "\n";
    }
    emit(c, result, summary);
    return status_code(r);
}

int run_gamma_esc(const Common& c, const std::string& params_path, const std::string& trace_path) {
    const auto file = io::load_system(c.system);
    const auto& su = need_uncertain(file, c.system);
    EscParams params;
    if (!params_path.empty()) params = io::esc_params_from_json(io::read_json(params_path), params_path);
    const auto trace = es_run(su.plant, params);
    if (!trace_path.empty()) {
        std::ofstream os(trace_path);
        if (!os) throw ValidationError(trace_path + ": cannot open file for writing");
        write_csv(os, trace);
    }
    Json result = {{"metric", "gamma_u_esc"},
                   {"final_gamma", trace.final_gamma},
                   {"final_omega", trace.final_omega},
                   {"max_gamma_after_warmup", trace.max_gamma_after_warmup},
                   {"steps", trace.steps},
                   {"samples", trace.size()},
                   {"params", io::esc_params_to_json(params)}};
    std::string summary = "gamma_u (extremum seeking) = " + fmt(trace.final_gamma) + " at omega = " +
                          fmt(trace.final_omega) + "\n";
    if (c.verify) {
        const auto gu = gamma_u_model(su, c.solver());
        const double dev = relative_deviation(trace.final_gamma, gu.value);
        result["model"] = {{"value", gu.value}, {"status", sdp::to_string(gu.status)}, {"relative_deviation", dev}};
        summary += "model-based gamma_u = " + fmt(gu.value) + ", relative deviation " + fmt(dev) + "\n";
    }
    emit(c, result, summary);
    return kOk;
}

struct GridArgs {
    GridOptions opts;
    std::string topology = "random-geometric";
};

void add_grid_flags(CLI::App* cmd, GridArgs& g) {
    cmd->add_option("--topology", g.topology, "ring or random-geometric")->capture_default_str();
    cmd->add_option("--certain", g.opts.n_certain, "number of certain buses")->capture_default_str();
    cmd->add_option("--uncertain", g.opts.n_uncertain, "number of uncertain buses")->capture_default_str();
    cmd->add_option("--radius", g.opts.radius, "random-geometric connection radius")->capture_default_str();
    cmd->add_option("--grid-seed", g.opts.seed, "topology seed")->capture_default_str();
    cmd->add_option("--inertia", g.opts.inertia, "bus inertia m")->capture_default_str();
    cmd->add_option("--damping", g.opts.damping, "bus damping d")->capture_default_str();
    cmd->add_option("--ground-ratio", g.opts.ground_ratio, "grounding relative to the mean susceptance")
        ->capture_default_str();
    cmd->add_option("--tie-scale", g.opts.tie_scale, "susceptance factor for lines crossing the partition")
        ->capture_default_str();
}

int run_gen_grid(const Common& c, GridArgs g) {
    g.opts.topology = topology_from_string(g.topology);
    io::SystemFile file;
    file.grid = make_grid(g.opts);
    auto [sc, su] = build_partitioned_system(*file.grid);
    file.certain = std::move(sc);
    file.uncertain = std::move(su);
    file.delta = c.delta;
    file.energy = c.energy;
    const auto& spec = *file.grid;
    std::string summary = std::string(to_string(spec.topology)) + " grid: " + std::to_string(spec.n_buses) +
                          " buses, " + std::to_string(spec.lines.size()) + " lines, " +
                          std::to_string(file.certain->states()) + " certain states, " +
                          std::to_string(file.uncertain->states()) + " uncertain states\n";
    emit(c, io::system_to_json(file), summary);
    return kOk;
}

struct BenchArgs {
    std::string grid = "default";
    int cases = 20;
    std::vector<int> attack{2, 4, 6};
    int monitor = 2;
    std::uint64_t seed = 2024;
    int threads = 0;
    std::string csv;
    std::string summary;
};

int run_bench(const Common& c, const BenchArgs& b) {
    GridSpec base;
    AttackBudget budget;
    if (b.grid == "default") {
        base = make_grid();
        budget.delta = c.delta.value_or(1.0);
        budget.energy = c.energy.value_or(1.0);
        budget.validate();
    } else {
        const auto file = io::load_system(b.grid);
        if (!file.grid) throw ValidationError(b.grid + ": grid: block missing");
        base = *file.grid;
        io::SystemFile defaults = file;
        if (!defaults.delta) defaults.delta = 1.0;
        if (!defaults.energy) defaults.energy = 1.0;
        budget = io::resolve_budget(defaults, c.delta, c.energy);
    }
    std::vector<GridSpec> specs;
    for (std::size_t k = 0; k < b.attack.size(); ++k) {
        auto batch = make_scenarios(base, b.attack[k], b.monitor, b.cases, b.seed + k);
        specs.insert(specs.end(), batch.begin(), batch.end());
    }
    BenchOptions options;
    options.threads = b.threads;
    options.solver = c.solver();
    const auto report = run_benchmark(specs, budget, options);

    if (!b.csv.empty()) {
        std::ofstream os(b.csv);
        if (!os) throw ValidationError(b.csv + ": cannot open file for writing");
        write_csv(os, report.records);
    }
    const auto& s = report.summary;
    if (!b.summary.empty()) {
        Json j = io::summary_to_json(s);
        j["budget"] = {{"delta", budget.delta}, {"energy", budget.energy}};
        j["cases"] = b.cases;
        j["attack"] = b.attack;
        j["monitor"] = b.monitor;
        j["seed"] = b.seed;
        io::write_json(b.summary, j);
    }
    std::cout << s.records << " scenarios, " << s.both_optimal << " with both metrics Optimal, "
              << s.proxy_unbounded << " with Q_hat unbounded, " << s.failures << " failures\n"
              << "bound violations: " << s.bound_violations << '\n'
              << "median relative gap: " << fmt(s.median_gap) << '\n'
              << "median t_proxy / t_full: " << fmt(s.median_time_ratio) << " (" << fmt(s.median_t_proxy)
              << " s / " << fmt(s.median_t_full) << " s)\n";
    return s.failures > 0 ? kNumerical : kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case impact of stealthy attacks on interconnected linear systems"};
    app.require_subcommand(1);

    Common common;
    std::optional<double> gamma_u;
    std::string esc_params;
    std::string esc_trace;
    GridArgs grid;
    BenchArgs bench;

    auto* oog = app.add_subcommand("oog", "output-to-output gain Q with both subsystems known");
    auto* proxy = app.add_subcommand("proxy", "proxy gain Q_hat from an L2-gain bound on the uncertain part");
    auto* gmodel = app.add_subcommand("gamma-model", "squared H-infinity norm of the uncertain subsystem");
    auto* gesc = app.add_subcommand("gamma-esc", "extremum-seeking estimate of the uncertain subsystem gain");
    auto* gen = app.add_subcommand("gen-grid", "generate a partitioned swing-equation grid system file");
    auto* bch = app.add_subcommand("bench", "compare Q and Q_hat over grid attack scenarios");

    for (auto* cmd : {oog, proxy, gmodel, gesc}) {
        cmd->add_option("--system", common.system, "system JSON file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", common.out, "result JSON path (stdout when omitted)");
        cmd->add_flag("--verify", common.verify, "cross-check against the frequency-domain oracle");
        add_solver_flags(cmd, common);
    }
    for (auto* cmd : {oog, proxy, gen, bch}) add_budget_flags(cmd, common);
    proxy->add_option("--gamma-u", gamma_u, "gain bound (default: model-based from the uncertain block)");
    gesc->add_option("--params", esc_params, "EscParams JSON")->check(CLI::ExistingFile);
    gesc->add_option("--trace", esc_trace, "trace CSV path");

    gen->add_option("--out", common.out, "system JSON path (stdout when omitted)");
    add_grid_flags(gen, grid);
    gen->add_option("--attack", grid.opts.n_attack, "number of attack buses")->capture_default_str();
    gen->add_option("--monitor", grid.opts.n_monitor, "number of monitor buses")->capture_default_str();
    gen->add_option("--seed", grid.opts.attack_seed, "attack-set seed")->capture_default_str();

    bch->add_option("--grid", bench.grid, "'default' or a system file with a grid block")->capture_default_str();
    bch->add_option("--cases", bench.cases, "scenarios per attack size")->check(CLI::PositiveNumber)
        ->capture_default_str();
    bch->add_option("--attack", bench.attack, "attack set sizes, e.g. 2,4,6")->delimiter(',')->capture_default_str();
    bch->add_option("--monitor", bench.monitor, "number of monitor buses")->capture_default_str();
    bch->add_option("--seed", bench.seed, "scenario seed")->capture_default_str();
    bch->add_option("--threads", bench.threads, "worker threads (default: OOG_THREADS or all processors)");
    bch->add_option("--out", bench.csv, "per-scenario CSV path");
    bch->add_option("--summary", bench.summary, "summary JSON path");
    add_solver_flags(bch, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*oog) return run_oog(common);
        if (*proxy) return run_proxy(common, gamma_u);
        if (*gmodel) return run_gamma_model(common);
        if (*gesc) return run_gamma_esc(common, esc_params, esc_trace);
        if (*gen) return run_gen_grid(common, grid);
        if (*bch) return run_bench(common, bench);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const WellPosednessError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const StabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kUnexpected;
}
