#include "oogsec/io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace oogsec::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
}

Matrix parse_matrix(const Json& j, const std::string& where) {
    if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
    if (!j.is_array()) fail(where, "expected a number or a list of rows");
    if (j.empty()) return Matrix(0, 0);
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array()) fail(where, "row " + std::to_string(r) + " is not a list");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw DimensionError(where + ": row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                 " entries, expected " + std::to_string(cols));
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const Json& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) {
                fail(where, "entry (" + std::to_string(r) + "," + std::to_string(c) + ") is not a number");
            }
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

// One matrix of a block with the dimension variables of its rows and columns.
struct Slot {
    const char* name;
    Matrix* target;
    int row_var;
    int col_var;
};

// Fills the dimension variables from the non-empty matrices, then shapes the
// empty ones as zero matrices.
void infer_dimensions(std::vector<Slot>& slots, std::size_t n_vars, const std::array<const char*, 6>& var_names,
                      const std::string& block) {
    std::vector<Eigen::Index> dims(n_vars, -1);
    std::vector<std::string> source(n_vars);
    auto bind = [&](int var, Eigen::Index value, const char* name) {
        auto& d = dims[static_cast<std::size_t>(var)];
        if (d < 0) {
            d = value;
            source[static_cast<std::size_t>(var)] = name;
        } else if (d != value) {
            throw DimensionError(block + "." + name + ": " + var_names[static_cast<std::size_t>(var)] + " = " +
                                 std::to_string(value) + " conflicts with " + std::to_string(d) + " from " + block +
                                 "." + source[static_cast<std::size_t>(var)]);
        }
    };
    for (const auto& s : slots) {
        if (s.target->rows() == 0 && s.target->cols() == 0) continue;
        if (s.row_var == s.col_var && s.target->rows() != s.target->cols()) {
            throw DimensionError(block + "." + s.name + ": must be square, got " + std::to_string(s.target->rows()) +
                                 "x" + std::to_string(s.target->cols()));
        }
        bind(s.row_var, s.target->rows(), s.name);
        bind(s.col_var, s.target->cols(), s.name);
    }
    for (auto& s : slots) {
        if (s.target->rows() != 0 || s.target->cols() != 0) continue;
        const Eigen::Index r = std::max<Eigen::Index>(dims[static_cast<std::size_t>(s.row_var)], 0);
        const Eigen::Index c = std::max<Eigen::Index>(dims[static_cast<std::size_t>(s.col_var)], 0);
        *s.target = Matrix::Zero(r, c);
    }
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) fail(where + "." + key, "unknown key");
    }
}

CertainSubsystem parse_certain(const Json& j, const std::string& where) {
    enum { n, mu, ma, pp, pr, pc };
    static const std::array<const char*, 6> vars{"n_c", "m_u", "m_a", "p_p", "p_r", "p_c"};
    CertainSubsystem sc;
    std::vector<Slot> slots{{"A_c", &sc.A_c, n, n},   {"B_c", &sc.B_c, n, mu},   {"F_x", &sc.F_x, n, ma},
                            {"C_p", &sc.C_p, pp, n},  {"D_p", &sc.D_p, pp, mu},  {"F_p", &sc.F_p, pp, ma},
                            {"C_r", &sc.C_r, pr, n},  {"D_r", &sc.D_r, pr, mu},  {"F_r", &sc.F_r, pr, ma},
                            {"C_c", &sc.C_c, pc, n},  {"D_c", &sc.D_c, pc, mu},  {"F_c", &sc.F_c, pc, ma}};
    std::set<std::string> names;
    for (const auto& s : slots) names.insert(s.name);
    check_keys(j, names, where);
    for (auto& s : slots) {
        if (j.contains(s.name)) *s.target = parse_matrix(j.at(s.name), where + "." + s.name);
    }
    infer_dimensions(slots, 6, vars, where);
    sc.validate();
    return sc;
}

UncertainSubsystem parse_uncertain(const Json& j, const std::string& where) {
    enum { n, in, out };
    static const std::array<const char*, 6> vars{"n_u", "p_c", "m_u", "", "", ""};
    UncertainSubsystem su;
    std::vector<Slot> slots{{"A_u", &su.plant.A, n, n},
                            {"B_u", &su.plant.B, n, in},
                            {"C_u", &su.plant.C, out, n},
                            {"D_u", &su.plant.D, out, in}};
    check_keys(j, {"A_u", "B_u", "C_u", "D_u"}, where);
    for (auto& s : slots) {
        if (j.contains(s.name)) *s.target = parse_matrix(j.at(s.name), where + "." + s.name);
    }
    infer_dimensions(slots, 3, vars, where);
    su.validate();
    return su;
}

double positive_number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) fail(where, "must be positive and finite");
    return v;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
std::vector<T> list_of(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected a list");
    std::vector<T> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) fail(where, "entry " + std::to_string(i) + " is not a number");
        if constexpr (std::is_integral_v<T>) {
            if (!j[i].is_number_integer()) fail(where, "entry " + std::to_string(i) + " is not an integer");
        }
        out.push_back(j[i].get<T>());
    }
    return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

SystemFile parse_system(const Json& doc, const std::string& source) {
    check_keys(doc, {"certain", "uncertain", "budget", "grid"}, source);
    SystemFile file;
    if (doc.contains("certain")) file.certain = parse_certain(doc.at("certain"), source + ": certain");
    if (doc.contains("uncertain")) file.uncertain = parse_uncertain(doc.at("uncertain"), source + ": uncertain");
    if (file.certain && file.uncertain) check_compatible(*file.certain, *file.uncertain);
    if (doc.contains("budget")) {
        const Json& b = doc.at("budget");
        const std::string where = source + ": budget";
        check_keys(b, {"delta", "energy"}, where);
        if (b.contains("delta")) file.delta = positive_number(b.at("delta"), where + ".delta");
        if (b.contains("energy")) file.energy = positive_number(b.at("energy"), where + ".energy");
    }
    if (doc.contains("grid")) file.grid = grid_from_json(doc.at("grid"), source + ": grid");
    return file;
}

SystemFile load_system(const std::string& path) {
    try {
        return parse_system(read_json(path), path);
    } catch (const DimensionError& e) {
        // check_compatible and validate() do not know the file name.
        const std::string msg = e.what();
        if (msg.rfind(path, 0) == 0) throw;
        throw DimensionError(path + ": " + msg);
    }
}

Json system_to_json(const SystemFile& file) {
    Json doc = Json::object();
    if (file.certain) {
        const auto& sc = *file.certain;
        doc["certain"] = {{"A_c", matrix_to_json(sc.A_c)}, {"B_c", matrix_to_json(sc.B_c)},
                          {"F_x", matrix_to_json(sc.F_x)}, {"C_p", matrix_to_json(sc.C_p)},
                          {"D_p", matrix_to_json(sc.D_p)}, {"F_p", matrix_to_json(sc.F_p)},
                          {"C_r", matrix_to_json(sc.C_r)}, {"D_r", matrix_to_json(sc.D_r)},
                          {"F_r", matrix_to_json(sc.F_r)}, {"C_c", matrix_to_json(sc.C_c)},
                          {"D_c", matrix_to_json(sc.D_c)}, {"F_c", matrix_to_json(sc.F_c)}};
    }
    if (file.uncertain) {
        const auto& p = file.uncertain->plant;
        doc["uncertain"] = {{"A_u", matrix_to_json(p.A)},
                            {"B_u", matrix_to_json(p.B)},
                            {"C_u", matrix_to_json(p.C)},
                            {"D_u", matrix_to_json(p.D)}};
    }
    if (file.delta || file.energy) {
        Json b = Json::object();
        if (file.delta) b["delta"] = *file.delta;
        if (file.energy) b["energy"] = *file.energy;
        doc["budget"] = std::move(b);
    }
    if (file.grid) doc["grid"] = grid_to_json(*file.grid);
    return doc;
}

AttackBudget resolve_budget(const SystemFile& file, std::optional<double> delta, std::optional<double> energy) {
    AttackBudget b;
    const auto d = delta ? delta : file.delta;
    const auto e = energy ? energy : file.energy;
    if (!d) throw ValidationError("budget.delta: not given by --delta or the system file");
    if (!e) throw ValidationError("budget.energy: not given by --energy or the system file");
    b.delta = *d;
    b.energy = *e;
    b.validate();
    return b;
}

Json grid_to_json(const GridSpec& spec) {
    Json lines = Json::array();
    for (const auto& l : spec.lines) lines.push_back({l.from, l.to, l.susceptance});
    return {{"n_buses", spec.n_buses},
            {"topology", to_string(spec.topology)},
            {"radius", spec.radius},
            {"seed", spec.seed},
            {"inertia", spec.inertia},
            {"damping", spec.damping},
            {"ground", spec.ground},
            {"lines", std::move(lines)},
            {"certain_buses", spec.certain_buses},
            {"uncertain_buses", spec.uncertain_buses},
            {"attack_buses", spec.attack_buses},
            {"monitor_buses", spec.monitor_buses}};
}

GridSpec grid_from_json(const Json& j, const std::string& source) {
    check_keys(j,
               {"n_buses", "topology", "radius", "seed", "inertia", "damping", "ground", "lines", "certain_buses",
                "uncertain_buses", "attack_buses", "monitor_buses"},
               source);
    auto need = [&](const char* key) -> const Json& {
        if (!j.contains(key)) fail(source + "." + key, "missing");
        return j.at(key);
    };
    GridSpec g;
    const Json& n = need("n_buses");
    if (!n.is_number_integer()) fail(source + ".n_buses", "expected an integer");
    g.n_buses = n.get<int>();
    if (j.contains("topology")) {
        if (!j.at("topology").is_string()) fail(source + ".topology", "expected a string");
        try {
            g.topology = topology_from_string(j.at("topology").get<std::string>());
        } catch (const std::exception& e) {
            fail(source + ".topology", e.what());
        }
    }
    if (j.contains("radius")) {
        if (!j.at("radius").is_number()) fail(source + ".radius", "expected a number");
        g.radius = j.at("radius").get<double>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail(source + ".seed", "expected a non-negative integer");
        g.seed = j.at("seed").get<std::uint64_t>();
    }
    g.inertia = list_of<double>(need("inertia"), source + ".inertia");
    g.damping = list_of<double>(need("damping"), source + ".damping");
    g.ground = list_of<double>(need("ground"), source + ".ground");
    const Json& lines = need("lines");
    if (!lines.is_array()) fail(source + ".lines", "expected a list");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string where = source + ".lines[" + std::to_string(i) + "]";
        const Json& l = lines[i];
        if (!l.is_array() || l.size() != 3 || !l[0].is_number_integer() || !l[1].is_number_integer() ||
            !l[2].is_number()) {
            fail(where, "expected [from, to, susceptance]");
        }
        g.lines.push_back({l[0].get<int>(), l[1].get<int>(), l[2].get<double>()});
    }
    g.certain_buses = list_of<int>(need("certain_buses"), source + ".certain_buses");
    g.uncertain_buses = list_of<int>(need("uncertain_buses"), source + ".uncertain_buses");
    g.attack_buses = list_of<int>(need("attack_buses"), source + ".attack_buses");
    g.monitor_buses = list_of<int>(need("monitor_buses"), source + ".monitor_buses");
    try {
        g.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return g;
}

Json metric_to_json(const MetricResult& r) {
    Json j = {{"metric", to_string(r.kind)},
              {"status", sdp::to_string(r.status)},
              {"unbounded", r.unbounded},
              {"value", number_or_null(r.value)},
              {"gamma", number_or_null(r.gamma)}};
    j["psi"] = r.psi ? number_or_null(*r.psi) : Json(nullptr);
    j["theta"] = r.theta ? number_or_null(*r.theta) : Json(nullptr);
    j["max_lmi_eigenvalue"] = number_or_null(r.max_lmi_eigenvalue);
    j["relative_gap"] = number_or_null(r.relative_gap);
    j["iterations"] = r.iterations;
    j["certificate"] = matrix_to_json(r.certificate);
    return j;
}

Json summary_to_json(const BenchSummary& s) {
    return {{"records", s.records},
            {"both_optimal", s.both_optimal},
            {"proxy_unbounded", s.proxy_unbounded},
            {"failures", s.failures},
            {"bound_violations", s.bound_violations},
            {"median_gap", number_or_null(s.median_gap)},
            {"median_time_ratio", number_or_null(s.median_time_ratio)},
            {"median_t_full", number_or_null(s.median_t_full)},
            {"median_t_proxy", number_or_null(s.median_t_proxy)}};
}

EscParams esc_params_from_json(const Json& j, const std::string& source) {
    EscParams p;
    const std::map<std::string, double*> reals{
        {"omega_base", &p.omega_base}, {"alpha_p", &p.alpha_p}, {"omega_p", &p.omega_p},
        {"phi_p", &p.phi_p},           {"omega_h", &p.omega_h}, {"omega_l", &p.omega_l},
        {"k_gain", &p.k_gain},         {"dt", &p.dt},           {"horizon", &p.horizon},
        {"warmup", &p.warmup},         {"denom_guard", &p.denom_guard}, {"window", &p.window}};
    if (!j.is_object()) fail(source, "expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string where = source + "." + key;
        if (auto it = reals.find(key); it != reals.end()) {
            if (!value.is_number()) fail(where, "expected a number");
            *it->second = value.get<double>();
        } else if (key == "trace_stride") {
            if (!value.is_number_integer()) fail(where, "expected an integer");
            p.trace_stride = value.get<int>();
        } else if (key == "phase") {
            const auto s = value.is_string() ? value.get<std::string>() : std::string();
            if (s == "integrated") {
                p.phase = PhaseMode::Integrated;
            } else if (s == "literal") {
                p.phase = PhaseMode::Literal;
            } else {
                fail(where, "expected \"integrated\" or \"literal\"");
            }
        } else if (key == "energy") {
            const auto s = value.is_string() ? value.get<std::string>() : std::string();
            if (s == "cumulative") {
                p.energy = EnergyMode::Cumulative;
            } else if (s == "discounted") {
                p.energy = EnergyMode::Discounted;
            } else {
                fail(where, "expected \"cumulative\" or \"discounted\"");
            }
        } else {
            fail(where, "unknown key");
        }
    }
    try {
        p.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return p;
}

Json esc_params_to_json(const EscParams& p) {
    return {{"omega_base", p.omega_base}, {"alpha_p", p.alpha_p},         {"omega_p", p.omega_p},
            {"phi_p", p.phi_p},           {"omega_h", p.omega_h},         {"omega_l", p.omega_l},
            {"k_gain", p.k_gain},         {"dt", p.dt},                   {"horizon", p.horizon},
            {"warmup", p.warmup},         {"denom_guard", p.denom_guard}, {"phase", to_string(p.phase)},
            {"energy", to_string(p.energy)}, {"window", p.window},        {"trace_stride", p.trace_stride}};
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open file");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ValidationError(path + ": cannot open file for writing");
    out << j.dump(2) << '\n';
    if (!out) throw ValidationError(path + ": write failed");
}

}  // namespace oogsec::io
