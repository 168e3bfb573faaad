#include "contact/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace contact::scenario {

using nlohmann::json;

namespace {

std::string join_path(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

std::string index_path(const std::string& base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

std::string describe_where(const std::string& where, const std::string& message, std::optional<std::size_t> offset)
{
    std::string out = where.empty() ? message : where + ": " + message;
    if (offset) {
        out += " (byte " + std::to_string(*offset) + ")";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

std::string sum_terms(std::size_t n, const std::function<std::string(std::size_t)>& term)
{
    std::string out;
    for (std::size_t i = 1; i <= n; ++i) {
        out += (i == 1 ? "" : " + ") + term(i);
    }
    return out;
}

std::string idx(const char* prefix, std::size_t i)
{
    return prefix + std::to_string(i);
}

std::vector<BuiltinSymmetry> rotations(std::size_t n)
{
    std::vector<BuiltinSymmetry> out;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j) {
            BuiltinSymmetry s{"rotation_" + std::to_string(i) + std::to_string(j),
                              std::vector<std::string>(n, "0"), "0", "infinitesimal"};
            s.components[i - 1] = "-" + idx("q", j);
            s.components[j - 1] = idx("q", i);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<BuiltinSymmetry> translations(std::size_t n)
{
    std::vector<BuiltinSymmetry> out;
    for (std::size_t i = 1; i <= n; ++i) {
        BuiltinSymmetry s{"translation_" + std::to_string(i), std::vector<std::string>(n, "0"), "0", "infinitesimal"};
        s.components[i - 1] = "1";
        out.push_back(std::move(s));
    }
    return out;
}

std::map<std::string, double> resolve_parameters(const BuiltinInfo& info, const std::map<std::string, double>& values)
{
    std::map<std::string, double> out;
    for (const auto& p : info.parameters) {
        out[p.name] = p.default_value;
    }
    for (const auto& [name, value] : values) {
        const auto it = std::find_if(info.parameters.begin(), info.parameters.end(),
                                     [&name](const BuiltinParameter& p) { return p.name == name; });
        if (it == info.parameters.end()) {
            throw ConfigError("system.params." + name, "unknown parameter for builtin '" + info.name + "'");
        }
        if (!std::isfinite(value)) {
            throw ConfigError("system.params." + name, "must be finite");
        }
        if (it->integer && (value < 1.0 || value != std::floor(value) || value > 64.0)) {
            throw ConfigError("system.params." + name, "must be an integer between 1 and 64");
        }
        out[name] = value;
    }
    return out;
}

} // namespace

ConfigError::ConfigError(std::string where, const std::string& message, std::optional<std::size_t> byte_offset)
    : std::runtime_error(describe_where(where, message, byte_offset)), where_(std::move(where)),
      byte_offset_(byte_offset)
{
}

const std::vector<BuiltinInfo>& builtin_catalog()
{
    static const std::vector<BuiltinInfo> catalog{
        {"free_damped_particle",
         "free particle with linear damping in z",
         {{"n", 1.0, true, "dimension of Q"}, {"gamma", 0.2, false, "damping rate"}},
         "L = sum_i qd_i^2 / 2 - gamma z",
         "qd(t) = qd(0) exp(-gamma t); from q = 0, qd = 1, z = 0: "
         "z(t) = (exp(-gamma t) - exp(-2 gamma t)) / (2 gamma) and E_L(t) = exp(-gamma t) / 2. "
         "Symmetries: translations d/dq_i (infinitesimal, f = qd_i); scaling q d/dq + 2z d/dz "
         "(generalized, f = q.qd - 2z)."},
        {"damped_oscillator",
         "isotropic harmonic oscillator with linear damping in z",
         {{"n", 2.0, true, "dimension of Q"}, {"omega", 1.0, false, "angular frequency"},
          {"gamma", 0.1, false, "damping rate"}},
         "L = sum_i (qd_i^2 - omega^2 q_i^2) / 2 - gamma z",
         "q'' = -omega^2 q - gamma q' per coordinate. Symmetries: rotations -q_j d/dq_i + q_i d/dq_j "
         "(infinitesimal, f = q_i qd_j - q_j qd_i, with f(t) = f(0) exp(-gamma t))."},
        {"central_potential_damped",
         "planar particle in the logarithmic central potential with linear damping in z",
         {{"k", 1.0, false, "potential strength"}, {"gamma", 0.1, false, "damping rate"}},
         "L = (qd1^2 + qd2^2) / 2 - k log(q1^2 + q2^2) / 2 - gamma z",
         "Symmetry: rotation -q2 d/dq1 + q1 d/dq2 (infinitesimal, f = q1 qd2 - q2 qd1, "
         "with f(t) = f(0) exp(-gamma t))."},
    };
    return catalog;
}

BuiltinInstance instantiate_builtin(const std::string& name, const std::map<std::string, double>& values)
{
    const auto& catalog = builtin_catalog();
    const auto it =
        std::find_if(catalog.begin(), catalog.end(), [&name](const BuiltinInfo& b) { return b.name == name; });
    if (it == catalog.end()) {
        throw ConfigError("system.builtin", "unknown builtin '" + name + "' (see list-systems)");
    }
    const std::map<std::string, double> params = resolve_parameters(*it, values);
    BuiltinInstance out;
    if (name == "free_damped_particle") {
        out.n = static_cast<std::size_t>(params.at("n"));
        out.lagrangian = sum_terms(out.n, [](std::size_t i) { return "0.5*" + idx("qd", i) + "^2"; }) + " - gamma*z";
        out.parameters = {{"gamma", params.at("gamma")}};
        out.symmetries = translations(out.n);
        BuiltinSymmetry scaling{"scaling", {}, "2*z", "generalized"};
        for (std::size_t i = 1; i <= out.n; ++i) {
            scaling.components.push_back(idx("q", i));
        }
        out.symmetries.push_back(std::move(scaling));
    } else if (name == "damped_oscillator") {
        out.n = static_cast<std::size_t>(params.at("n"));
        out.lagrangian = sum_terms(out.n,
                                   [](std::size_t i) {
                                       return "0.5*" + idx("qd", i) + "^2 - 0.5*omega^2*" + idx("q", i) + "^2";
                                   })
                         + " - gamma*z";
        out.parameters = {{"omega", params.at("omega")}, {"gamma", params.at("gamma")}};
        out.symmetries = rotations(out.n);
    } else {
        out.n = 2;
        out.lagrangian = "0.5*(qd1^2 + qd2^2) - 0.5*k*log(q1^2 + q2^2) - gamma*z";
        out.parameters = {{"k", params.at("k")}, {"gamma", params.at("gamma")}};
        out.symmetries = rotations(2);
    }
    return out;
}

std::string catalog_text()
{
    std::ostringstream out;
    for (const auto& b : builtin_catalog()) {
        out << b.name << "(";
        for (std::size_t i = 0; i < b.parameters.size(); ++i) {
            out << (i ? ", " : "") << b.parameters[i].name << " = " << b.parameters[i].default_value;
        }
        out << ")\n  " << b.summary << "\n  " << b.lagrangian_doc << "\n  " << b.oracle_doc << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

void require_object(const json& j, const std::string& where)
{
    if (!j.is_object()) {
        throw ConfigError(where, "expected an object");
    }
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&key](const char* k) { return key == k; })) {
            throw ConfigError(join_path(where, key), "unknown key");
        }
    }
}

const json* find(const json& j, const char* key)
{
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

std::string get_string(const json& j, const std::string& where)
{
    if (!j.is_string()) {
        throw ConfigError(where, "expected a string");
    }
    return j.get<std::string>();
}

// Expressions may be written as strings or plain numbers.
std::string get_expression(const json& j, const std::string& where)
{
    if (j.is_number()) {
        return format_number(j.get<double>());
    }
    if (!j.is_string()) {
        throw ConfigError(where, "expected an expression string");
    }
    return j.get<std::string>();
}

double get_number(const json& j, const std::string& where)
{
    if (!j.is_number() || !std::isfinite(j.get<double>())) {
        throw ConfigError(where, "expected a finite number");
    }
    return j.get<double>();
}

bool get_bool(const json& j, const std::string& where)
{
    if (!j.is_boolean()) {
        throw ConfigError(where, "expected true or false");
    }
    return j.get<bool>();
}

std::vector<double> get_numbers(const json& j, const std::string& where)
{
    if (!j.is_array()) {
        throw ConfigError(where, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_number(j[i], index_path(where, i)));
    }
    return out;
}

std::vector<std::string> get_expressions(const json& j, const std::string& where)
{
    if (!j.is_array()) {
        throw ConfigError(where, "expected an array of expressions");
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_expression(j[i], index_path(where, i)));
    }
    return out;
}

std::vector<std::string> get_strings(const json& j, const std::string& where)
{
    if (j.is_string()) {
        return {j.get<std::string>()};
    }
    if (!j.is_array()) {
        throw ConfigError(where, "expected a string or an array of strings");
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_string(j[i], index_path(where, i)));
    }
    return out;
}

Parameters get_parameters(const json& j, const std::string& where)
{
    require_object(j, where);
    Parameters out;
    for (const auto& [key, value] : j.items()) {
        out[key] = get_number(value, join_path(where, key));
    }
    return out;
}

void parse_system(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "system";
    require_object(j, where);
    allow_keys(j, where, {"builtin", "params", "lagrangian", "hamiltonian", "n"});
    const int forms = (find(j, "builtin") ? 1 : 0) + (find(j, "lagrangian") ? 1 : 0) + (find(j, "hamiltonian") ? 1 : 0);
    if (forms != 1) {
        throw ConfigError(where, "give exactly one of builtin, lagrangian, hamiltonian");
    }
    SystemSpec& s = cfg.system;
    const Parameters params = find(j, "params") ? get_parameters(j["params"], "system.params") : Parameters{};
    if (const json* b = find(j, "builtin")) {
        if (find(j, "n")) {
            throw ConfigError("system.n", "builtins take n through params");
        }
        s.builtin = get_string(*b, "system.builtin");
        const BuiltinInstance inst = instantiate_builtin(s.builtin, params);
        s.side = Side::lagrangian;
        s.n = inst.n;
        s.source = inst.lagrangian;
        s.parameters = inst.parameters;
        return;
    }
    const bool lagrangian = find(j, "lagrangian") != nullptr;
    s.side = lagrangian ? Side::lagrangian : Side::hamiltonian;
    s.source = get_expression(lagrangian ? j["lagrangian"] : j["hamiltonian"],
                              lagrangian ? "system.lagrangian" : "system.hamiltonian");
    if (!find(j, "n")) {
        throw ConfigError("system.n", "inline systems need n");
    }
    const double n = get_number(j["n"], "system.n");
    if (n < 1.0 || n > 64.0 || n != std::floor(n)) {
        throw ConfigError("system.n", "must be an integer between 1 and 64");
    }
    s.n = static_cast<std::size_t>(n);
    s.parameters = params;
}

void parse_initial_state(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "initial_state";
    require_object(j, where);
    const bool lagrangian = cfg.system.side == Side::lagrangian;
    const char* momentum_key = lagrangian ? "qd" : "p";
    if (lagrangian) {
        allow_keys(j, where, {"q", "qd", "z"});
    } else {
        allow_keys(j, where, {"q", "p", "z"});
    }
    if (!find(j, "q") || !find(j, momentum_key)) {
        throw ConfigError(where, std::string("needs q and ") + momentum_key);
    }
    const std::vector<double> q = get_numbers(j["q"], "initial_state.q");
    const std::vector<double> v = get_numbers(j[momentum_key], join_path(where, momentum_key));
    const double z = find(j, "z") ? get_number(j["z"], "initial_state.z") : 0.0;
    const std::size_t n = cfg.system.n;
    if (q.size() != n) {
        throw ConfigError("initial_state.q", "expected " + std::to_string(n) + " entries");
    }
    if (v.size() != n) {
        throw ConfigError(join_path(where, momentum_key), "expected " + std::to_string(n) + " entries");
    }
    cfg.initial_state.resize(static_cast<Eigen::Index>(2 * n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        cfg.initial_state(static_cast<Eigen::Index>(i)) = q[i];
        cfg.initial_state(static_cast<Eigen::Index>(n + i)) = v[i];
    }
    cfg.initial_state(static_cast<Eigen::Index>(2 * n)) = z;
}

void parse_integrator(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "integrator";
    require_object(j, where);
    allow_keys(j, where, {"method", "step", "t_final"});
    if (const json* m = find(j, "method")) {
        const std::string method = get_string(*m, "integrator.method");
        if (method == "rk4") {
            cfg.method = Method::rk4;
        } else if (method == "euler") {
            cfg.method = Method::euler;
        } else {
            throw ConfigError("integrator.method", "expected rk4 or euler");
        }
    }
    if (!find(j, "step") || !find(j, "t_final")) {
        throw ConfigError(where, "needs step and t_final");
    }
    cfg.step = get_number(j["step"], "integrator.step");
    cfg.t_final = get_number(j["t_final"], "integrator.t_final");
    if (!(cfg.step > 0.0) || cfg.step > cfg.t_final) {
        throw ConfigError(where, "needs 0 < step <= t_final");
    }
}

void parse_monitors(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "monitors";
    if (!j.is_array()) {
        throw ConfigError(where, "expected an array");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = index_path(where, i);
        require_object(j[i], w);
        allow_keys(j[i], w, {"name", "expr"});
        if (!find(j[i], "name") || !find(j[i], "expr")) {
            throw ConfigError(w, "needs name and expr");
        }
        cfg.monitors.push_back({get_string(j[i]["name"], w + ".name"), get_expression(j[i]["expr"], w + ".expr")});
    }
}

const std::set<std::string>& known_classes(Side side)
{
    static const std::set<std::string> lagrangian{"infinitesimal", "generalized", "noether", "lie"};
    static const std::set<std::string> hamiltonian{"dynamical", "cartan"};
    return side == Side::lagrangian ? lagrangian : hamiltonian;
}

void parse_candidates(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "candidates";
    if (!j.is_array()) {
        throw ConfigError(where, "expected an array");
    }
    const Side side = cfg.system.side;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = index_path(where, i);
        require_object(j[i], w);
        allow_keys(j[i], w, {"name", "kind", "components", "z_component", "a", "g", "expect", "expect_fail"});
        if (!find(j[i], "name") || !find(j[i], "components")) {
            throw ConfigError(w, "needs name and components");
        }
        CandidateSpec c;
        c.name = get_string(j[i]["name"], w + ".name");
        c.components = get_expressions(j[i]["components"], w + ".components");
        const std::string kind =
            find(j[i], "kind") ? get_string(j[i]["kind"], w + ".kind") : (side == Side::lagrangian ? "on_Q" : "contact");
        if (side == Side::lagrangian) {
            if (kind != "on_Q" && kind != "on_QxR") {
                throw ConfigError(w + ".kind", "expected on_Q or on_QxR");
            }
            c.on_q = kind == "on_Q";
            if (find(j[i], "z_component")) {
                if (c.on_q) {
                    throw ConfigError(w + ".z_component", "fields on Q have no z component (use kind on_QxR)");
                }
                c.z_component = get_expression(j[i]["z_component"], w + ".z_component");
            }
            if (c.components.size() != cfg.system.n) {
                throw ConfigError(w + ".components", "expected " + std::to_string(cfg.system.n) + " components");
            }
        } else {
            if (kind != "contact") {
                throw ConfigError(w + ".kind", "Hamiltonian systems take candidates of kind contact");
            }
            if (find(j[i], "z_component")) {
                throw ConfigError(w + ".z_component", "give all 2n+1 components instead");
            }
            c.on_q = false;
            if (c.components.size() != 2 * cfg.system.n + 1) {
                throw ConfigError(w + ".components", "expected " + std::to_string(2 * cfg.system.n + 1)
                                                         + " components over (q, p, z)");
            }
        }
        if (find(j[i], "a") || find(j[i], "g")) {
            c.a = find(j[i], "a") ? get_expression(j[i]["a"], w + ".a") : "0";
            c.g = find(j[i], "g") ? get_expression(j[i]["g"], w + ".g") : "0";
        }
        for (const char* key : {"expect", "expect_fail"}) {
            if (!find(j[i], key)) {
                continue;
            }
            const std::string kw = w + "." + key;
            std::vector<std::string> classes = get_strings(j[i][key], kw);
            for (const auto& cls : classes) {
                if (!known_classes(side).contains(cls)) {
                    throw ConfigError(kw, "unknown symmetry class '" + cls + "'");
                }
            }
            (std::string(key) == "expect" ? c.expect : c.expect_fail) = std::move(classes);
        }
        cfg.candidates.push_back(std::move(c));
    }
}

void parse_families(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "generator_families";
    if (!j.is_array()) {
        throw ConfigError(where, "expected an array");
    }
    const std::size_t width = cfg.system.side == Side::lagrangian ? cfg.system.n : 2 * cfg.system.n + 1;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = index_path(where, i);
        require_object(j[i], w);
        allow_keys(j[i], w, {"name", "generators", "shift_z", "expect_invariant"});
        if (!find(j[i], "name") || !find(j[i], "generators")) {
            throw ConfigError(w, "needs name and generators");
        }
        FamilySpec f;
        f.name = get_string(j[i]["name"], w + ".name");
        const json& gens = j[i]["generators"];
        if (!gens.is_array() || gens.empty()) {
            throw ConfigError(w + ".generators", "expected a nonempty array of component arrays");
        }
        for (std::size_t k = 0; k < gens.size(); ++k) {
            const std::string gw = index_path(w + ".generators", k);
            f.generators.push_back(get_expressions(gens[k], gw));
            if (f.generators.back().size() != width) {
                throw ConfigError(gw, "expected " + std::to_string(width) + " components");
            }
        }
        if (const json* s = find(j[i], "shift_z")) {
            f.shift_z = get_bool(*s, w + ".shift_z");
            if (f.shift_z && cfg.system.side != Side::lagrangian) {
                throw ConfigError(w + ".shift_z", "only applies to lifted families");
            }
        }
        if (const json* e = find(j[i], "expect_invariant")) {
            f.expect_invariant = get_bool(*e, w + ".expect_invariant");
        }
        cfg.families.push_back(std::move(f));
    }
}

void parse_checks(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "checks";
    require_object(j, where);
    allow_keys(j, where,
               {"classify", "trajectory_dissipation", "quotients", "momentum", "herglotz", "energy_law",
                "expectations"});
    const std::pair<const char*, bool*> toggles[] = {
        {"classify", &cfg.checks.classify},       {"trajectory_dissipation", &cfg.checks.trajectory_dissipation},
        {"quotients", &cfg.checks.quotients},     {"momentum", &cfg.checks.momentum},
        {"herglotz", &cfg.checks.herglotz},       {"energy_law", &cfg.checks.energy_law},
        {"expectations", &cfg.checks.expectations},
    };
    for (const auto& [key, flag] : toggles) {
        if (const json* v = find(j, key)) {
            *flag = get_bool(*v, join_path(where, key));
        }
    }
}

void parse_sample(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "sample";
    require_object(j, where);
    allow_keys(j, where, {"count", "box", "seed"});
    if (const json* c = find(j, "count")) {
        if (!c->is_number_integer() || c->get<long long>() < 1 || c->get<long long>() > 100000) {
            throw ConfigError("sample.count", "expected an integer between 1 and 100000");
        }
        cfg.sample.count = c->get<std::size_t>();
    }
    if (const json* b = find(j, "box")) {
        cfg.sample.half_width = get_number(*b, "sample.box");
        if (!(cfg.sample.half_width > 0.0)) {
            throw ConfigError("sample.box", "must be positive");
        }
    }
    if (const json* s = find(j, "seed")) {
        if (!s->is_number_unsigned()) {
            throw ConfigError("sample.seed", "expected a nonnegative integer");
        }
        cfg.sample.seed = s->get<std::uint64_t>();
    }
}

void parse_output(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "output";
    require_object(j, where);
    allow_keys(j, where, {"csv", "report"});
    if (const json* c = find(j, "csv")) {
        cfg.output.csv = get_string(*c, "output.csv");
    }
    if (const json* r = find(j, "report")) {
        cfg.output.report = get_string(*r, "output.report");
    }
}

void parse_expectations(const json& j, ScenarioConfig& cfg)
{
    const std::string where = "expectations";
    if (!j.is_array()) {
        throw ConfigError(where, "expected an array");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = index_path(where, i);
        require_object(j[i], w);
        allow_keys(j[i], w, {"name", "column", "expr", "tolerance"});
        if (!find(j[i], "column") || !find(j[i], "expr") || !find(j[i], "tolerance")) {
            throw ConfigError(w, "needs column, expr and tolerance");
        }
        ExpectationSpec e;
        e.column = get_string(j[i]["column"], w + ".column");
        e.name = find(j[i], "name") ? get_string(j[i]["name"], w + ".name") : e.column;
        e.expr = get_expression(j[i]["expr"], w + ".expr");
        e.tolerance = get_number(j[i]["tolerance"], w + ".tolerance");
        if (!(e.tolerance >= 0.0)) {
            throw ConfigError(w + ".tolerance", "must be nonnegative");
        }
        cfg.expectations.push_back(std::move(e));
    }
}

} // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    require_object(j, "");
    allow_keys(j, "",
               {"schema", "description", "system", "initial_state", "integrator", "monitors", "candidates",
                "generator_families", "checks", "sample", "output", "expectations"});
    ScenarioConfig cfg;
    cfg.origin = origin;
    cfg.text = text;
    if (const json* s = find(j, "schema")) {
        if (!s->is_number_integer() || s->get<int>() != 1) {
            throw ConfigError("schema", "only schema 1 is supported");
        }
    }
    for (const char* key : {"system", "initial_state", "integrator"}) {
        if (!find(j, key)) {
            throw ConfigError(key, "missing");
        }
    }
    parse_system(j["system"], cfg);
    parse_initial_state(j["initial_state"], cfg);
    parse_integrator(j["integrator"], cfg);
    if (const json* m = find(j, "monitors")) {
        parse_monitors(*m, cfg);
    }
    if (const json* c = find(j, "candidates")) {
        parse_candidates(*c, cfg);
    }
    if (const json* f = find(j, "generator_families")) {
        parse_families(*f, cfg);
    }
    if (const json* c = find(j, "checks")) {
        parse_checks(*c, cfg);
    }
    if (const json* s = find(j, "sample")) {
        parse_sample(*s, cfg);
    }
    if (const json* o = find(j, "output")) {
        parse_output(*o, cfg);
    }
    if (const json* e = find(j, "expectations")) {
        parse_expectations(*e, cfg);
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ScenarioConfig cfg = parse_config(buffer.str(), path.string());
    const std::filesystem::path base = path.parent_path();
    for (auto* p : {&cfg.output.csv, &cfg.output.report}) {
        if (!p->empty() && p->is_relative()) {
            *p = base / *p;
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

namespace {

class Runner
{
public:
    Runner(const ScenarioConfig& cfg, const RunOptions& options) : cfg_(cfg), options_(options)
    {
        if (!(options.tol_scale > 0.0) || !std::isfinite(options.tol_scale)) {
            throw ConfigError("--tol-scale", "must be a positive number");
        }
        const double s = options.tol_scale;
        tol_.symmetry = tol_.symmetry.scaled(s);
        for (double* t : {&tol_.trajectory, &tol_.quotient, &tol_.energy_law, &tol_.herglotz, &tol_.momentum,
                          &tol_.reeb, &tol_.invariance, &tol_.consistency}) {
            *t *= s;
        }
        sample_ = cfg.sample;
        if (options.seed) {
            sample_.seed = *options.seed;
        }
    }

    ScenarioResult run();

private:
    // Expression helpers that turn library errors into positioned config errors.
    ScalarField field(const std::string& source, const Chart& chart, const std::string& where) const;
    [[noreturn]] void rethrow(const std::string& source, const std::string& where) const;
    std::optional<std::size_t> locate(const std::string& source, std::size_t offset) const;

    void check(const std::string& name, double value, double tolerance, json detail = nullptr);
    void flag(const std::string& name, bool passed, json detail = nullptr);
    void add_column(std::string name, std::vector<double> values);
    std::vector<double> along(const Observable& f) const;

    void run_lagrangian();
    void run_hamiltonian();
    void run_expectations();
    json provenance() const;

    const ScenarioConfig& cfg_;
    RunOptions options_;
    Tolerances tol_;
    SampleSpec sample_;

    IntegrationResult integration_;
    json candidates_ = json::array();
    json families_ = json::array();
    json checks_ = json::array();
    bool passed_ = true;
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> series_;
};

json measured(double value, double tolerance)
{
    return {{"value", std::isfinite(value) ? json(value) : json(nullptr)},
            {"tolerance", tolerance},
            {"pass", std::isfinite(value) && value <= tolerance}};
}

std::optional<std::size_t> Runner::locate(const std::string& source, std::size_t offset) const
{
    const std::string quoted = json(source).dump();
    const std::size_t pos = cfg_.text.find(quoted);
    if (pos == std::string::npos || quoted.size() != source.size() + 2) {
        return std::nullopt;
    }
    return pos + 1 + offset;
}

void Runner::rethrow(const std::string& source, const std::string& where) const
{
    try {
        throw;
    } catch (const ParseError& e) {
        throw ConfigError(where, std::string(e.what()) + " in '" + source + "'", locate(source, e.offset()));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where, std::string(e.what()) + " in '" + source + "'", locate(source, 0));
    }
}

ScalarField Runner::field(const std::string& source, const Chart& chart, const std::string& where) const
{
    try {
        return ScalarField::parse(source, chart, cfg_.system.parameters);
    } catch (const std::exception&) {
        rethrow(source, where);
    }
}

void Runner::check(const std::string& name, double value, double tolerance, json detail)
{
    json entry = measured(value, tolerance);
    entry["name"] = name;
    if (!detail.is_null()) {
        entry["detail"] = std::move(detail);
    }
    passed_ = passed_ && entry["pass"].get<bool>();
    checks_.push_back(std::move(entry));
}

void Runner::flag(const std::string& name, bool passed, json detail)
{
    json entry{{"name", name}, {"pass", passed}};
    if (!detail.is_null()) {
        entry["detail"] = std::move(detail);
    }
    passed_ = passed_ && passed;
    checks_.push_back(std::move(entry));
}

void Runner::add_column(std::string name, std::vector<double> values)
{
    columns_.push_back(std::move(name));
    series_.push_back(std::move(values));
}

std::vector<double> Runner::along(const Observable& f) const
{
    std::vector<double> out;
    out.reserve(integration_.trajectory.size());
    for (const auto& s : integration_.trajectory.states) {
        try {
            out.push_back(f.value_at(s));
        } catch (const std::domain_error&) {
            out.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return out;
}

json Runner::provenance() const
{
    return {{"config", cfg_.origin},
            {"seed", sample_.seed},
            {"step", cfg_.step},
            {"t_final", cfg_.t_final},
            {"method", cfg_.method == Method::rk4 ? "rk4" : "euler"},
            {"tol_scale", options_.tol_scale}};
}

void Runner::run_lagrangian()
{
    const std::size_t n = cfg_.system.n;
    const Chart chart = lagrangian_chart(n);
    const LagrangianSystem sys(n, field(cfg_.system.source, chart,
                                        cfg_.system.builtin.empty() ? "system.lagrangian" : "system.builtin"));

    IntegratorConfig icfg{cfg_.method, cfg_.step, cfg_.t_final, {}};
    for (std::size_t i = 0; i < cfg_.monitors.size(); ++i) {
        const auto& m = cfg_.monitors[i];
        icfg.monitors.push_back({m.name, field(m.expr, chart, index_path("monitors", i) + ".expr")});
    }

    // Candidate and family fields are built before any numerics so config errors surface first.
    std::vector<SymmetryCandidate> candidates;
    for (std::size_t i = 0; i < cfg_.candidates.size(); ++i) {
        const CandidateSpec& c = cfg_.candidates[i];
        const std::string w = index_path("candidates", i);
        SymmetryCandidate sc{c.name, VectorFieldQ::zero(n), std::nullopt};
        try {
            if (c.on_q) {
                sc.field = VectorFieldQ::parse(c.components, cfg_.system.parameters);
            } else {
                sc.field = VectorFieldQR::parse(c.components, c.z_component, cfg_.system.parameters);
            }
        } catch (const std::exception&) {
            // Find the offending component for the message.
            for (std::size_t k = 0; k < c.components.size(); ++k) {
                try {
                    (void)parse(c.components[k]);
                } catch (const std::exception&) {
                    rethrow(c.components[k], index_path(w + ".components", k));
                }
            }
            rethrow(c.on_q ? c.components.front() : c.z_component, w);
        }
        if (c.a) {
            sc.cartan_data = CartanData{field(*c.a, chart, w + ".a"), field(*c.g, chart, w + ".g")};
        }
        candidates.push_back(std::move(sc));
    }
    std::vector<GeneratorFamily> families;
    for (std::size_t i = 0; i < cfg_.families.size(); ++i) {
        const FamilySpec& f = cfg_.families[i];
        std::vector<VectorFieldQ> gens;
        for (std::size_t k = 0; k < f.generators.size(); ++k) {
            const std::string w = index_path(index_path("generator_families", i) + ".generators", k);
            try {
                gens.push_back(VectorFieldQ::parse(f.generators[k], cfg_.system.parameters));
            } catch (const std::exception&) {
                rethrow(f.generators[k].front(), w);
            }
        }
        families.emplace_back(f.name, std::move(gens), f.shift_z);
    }

    integration_ = integrate_lagrangian(sys, TQRPoint::from_vector(cfg_.initial_state), icfg);
    const Trajectory& traj = integration_.trajectory;
    flag("integration", integration_.ok(),
         json{{"nodes", traj.size()}, {"error", integration_.error ? json(*integration_.error) : json(nullptr)}});
    const bool have_traj = integration_.ok() && traj.size() >= 3;

    add_column("t", traj.times);
    for (std::size_t i = 0; i < 2 * n + 1; ++i) {
        std::vector<double> col;
        for (const auto& s : traj.states) {
            col.push_back(s(static_cast<Eigen::Index>(i)));
        }
        add_column(chart[i], std::move(col));
    }
    add_column("E_L", traj.monitors.at("E_L"));
    for (const auto& m : icfg.monitors) {
        add_column(m.name, traj.monitors.at(m.name));
    }

    if (have_traj && cfg_.checks.energy_law) {
        const std::vector<double> integral = z_rate_integral(sys, traj);
        const auto& e = traj.monitors.at("E_L");
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            worst = std::max(worst, std::abs(e[k] - e[0] * std::exp(integral[k])));
        }
        check("energy law E_L(t) = E_L(0) exp(int dL/dz)", worst, tol_.energy_law);
    }
    if (have_traj && cfg_.checks.herglotz) {
        check("Herglotz equations along the trajectory", herglotz_residual(sys, traj), tol_.herglotz);
    }

    std::optional<SamplePoints> points;
    auto sample = [&]() -> const SamplePoints& {
        if (!points) {
            points = sample_regular_points(sys, sample_);
        }
        return *points;
    };

    if (cfg_.checks.classify) {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const CandidateSpec& spec = cfg_.candidates[i];
            const SymmetryReport r = classify(sys, candidates[i], sample(), have_traj ? &traj : nullptr,
                                              tol_.symmetry, sample_);
            json classes = json::object();
            for (SymmetryClass c : all_symmetry_classes) {
                const ClassResult& cr = r[c];
                classes[to_string(c)] = {{"verdict", to_string(cr.verdict)},
                                         {"residual", cr.residual},
                                         {"tolerance", cr.tolerance},
                                         {"fail_above", cr.tolerance * tol_.symmetry.fail_factor},
                                         {"note", cr.note}};
            }
            json entry{{"name", spec.name},
                       {"kind", spec.on_q ? "on_Q" : "on_QxR"},
                       {"classes", classes},
                       {"selected", r.selected ? json(to_string(*r.selected)) : json(nullptr)},
                       {"dissipated_quantity", r.dissipated_field.label()},
                       {"dissipation_residual", measured(r.dissipation_residual, r.dissipation_tolerance)}};

            bool classes_ok = true;
            json mismatches = json::array();
            auto verdict_of = [&r](const std::string& name) {
                for (SymmetryClass c : all_symmetry_classes) {
                    if (to_string(c) == name) {
                        return r[c].verdict;
                    }
                }
                return Verdict::not_tested;
            };
            for (const auto& cls : spec.expect) {
                if (verdict_of(cls) != Verdict::pass) {
                    classes_ok = false;
                    mismatches.push_back(cls + " expected pass, got " + to_string(verdict_of(cls)));
                }
            }
            for (const auto& cls : spec.expect_fail) {
                if (verdict_of(cls) != Verdict::fail) {
                    classes_ok = false;
                    mismatches.push_back(cls + " expected fail, got " + to_string(verdict_of(cls)));
                }
            }
            if (spec.expect.empty() && spec.expect_fail.empty() && !r.selected) {
                classes_ok = false;
                mismatches.push_back("no symmetry class passed");
            }
            flag("candidate " + spec.name + ": classification", classes_ok, mismatches);

            if (r.selected) {
                check("candidate " + spec.name + ": f dissipated on the sample", r.dissipation_residual,
                      r.dissipation_tolerance);
                std::vector<double> fv = along(r.dissipated_field);
                std::optional<std::vector<double>> ratio;
                if (have_traj && cfg_.checks.trajectory_dissipation && r.trajectory) {
                    entry["trajectory"] = {{"rate_residual", measured(r.trajectory->rate_residual, tol_.trajectory)},
                                           {"deviation", measured(r.trajectory->deviation, tol_.trajectory)}};
                    check("candidate " + spec.name + ": f' = (dL/dz) f along the trajectory",
                          r.trajectory->rate_residual, tol_.trajectory);
                    check("candidate " + spec.name + ": f exp(-int dL/dz) constant", r.trajectory->deviation,
                          tol_.trajectory);
                }
                if (have_traj && cfg_.checks.quotients) {
                    if (const std::optional<double> q = quotient_deviation(sys, r.dissipated_field, traj)) {
                        entry["quotient_deviation"] = measured(*q, tol_.quotient);
                        check("candidate " + spec.name + ": f / E_L conserved", *q, tol_.quotient);
                        const auto& e = traj.monitors.at("E_L");
                        ratio.emplace(fv.size());
                        for (std::size_t k = 0; k < fv.size(); ++k) {
                            (*ratio)[k] = fv[k] / e[k];
                        }
                    } else {
                        entry["quotient_deviation"] = nullptr;
                        entry["quotient_note"] = "E_L comes too close to 0 along the trajectory";
                    }
                }
                add_column("f_" + spec.name, std::move(fv));
                if (ratio) {
                    add_column("f_" + spec.name + "/E_L", std::move(*ratio));
                }
            }
            candidates_.push_back(std::move(entry));
        }
    }

    if (cfg_.checks.momentum) {
        for (std::size_t i = 0; i < families.size(); ++i) {
            const GeneratorFamily& fam = families[i];
            const FamilySpec& spec = cfg_.families[i];
            const MomentumDissipation md = momentum_dissipation_check(fam, sys, sample(), tol_.invariance);
            const ReebAnnihilation ra = reeb_annihilation_check(fam, sys, sample(), tol_.momentum);
            json gens = json::array();
            const std::vector<Observable> j = momentum_components(fam, sys);
            for (std::size_t k = 0; k < fam.size(); ++k) {
                json g{{"invariance", measured(md.invariance[k], tol_.invariance)},
                       {"dissipation_residual", measured(md.residuals[k], tol_.momentum)},
                       {"reeb_residual", measured(ra.residuals[k], tol_.reeb)},
                       {"lie_derivative_eta", measured(ra.lie_eta[k], tol_.momentum)}};
                const std::string label = spec.name + "[" + std::to_string(k + 1) + "]";
                if (md.hypothesis_holds) {
                    check("family " + label + ": J dissipated", md.residuals[k], tol_.momentum);
                }
                if (ra.preserves_eta[k]) {
                    check("family " + label + ": R(J) = 0", ra.residuals[k], tol_.reeb);
                }
                if (!fam.shift_z()) {
                    const Observable fv = dissipated_for_infinitesimal(sys, fam.base_fields()[k]);
                    double worst = 0.0;
                    for (const auto& pt : sample()) {
                        worst = std::max(worst, std::abs(j[k].value_at(pt) - fv.value_at(pt)));
                    }
                    g["matches_vertical_lift"] = measured(worst, tol_.consistency);
                    check("family " + label + ": J = xi^V(L)", worst, tol_.consistency);
                }
                gens.push_back(std::move(g));
                add_column("J_" + spec.name + "_" + std::to_string(k + 1), along(j[k]));
            }
            flag("family " + spec.name + ": invariance hypothesis", md.hypothesis_holds == spec.expect_invariant,
                 json{{"holds", md.hypothesis_holds}, {"expected", spec.expect_invariant}});
            families_.push_back({{"name", spec.name},
                                 {"shift_z", spec.shift_z},
                                 {"hypothesis_holds", md.hypothesis_holds},
                                 {"generators", std::move(gens)}});
        }
    }
}

void Runner::run_hamiltonian()
{
    const std::size_t n = cfg_.system.n;
    const Chart chart = hamiltonian_chart(n);
    const HamiltonianSystem sys(n, field(cfg_.system.source, chart, "system.hamiltonian"));

    IntegratorConfig icfg{cfg_.method, cfg_.step, cfg_.t_final, {}};
    for (std::size_t i = 0; i < cfg_.monitors.size(); ++i) {
        const auto& m = cfg_.monitors[i];
        icfg.monitors.push_back({m.name, field(m.expr, chart, index_path("monitors", i) + ".expr")});
    }

    auto ambient = [&](const std::vector<std::string>& components, const std::string& w, const std::string& label) {
        std::vector<ScalarField> fields;
        for (std::size_t k = 0; k < components.size(); ++k) {
            fields.push_back(field(components[k], chart, index_path(w, k)));
        }
        return AmbientVectorField::from_components(fields, label);
    };
    struct Candidate
    {
        AmbientVectorField x;
        std::optional<std::pair<Observable, Observable>> ag;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < cfg_.candidates.size(); ++i) {
        const CandidateSpec& c = cfg_.candidates[i];
        const std::string w = index_path("candidates", i);
        Candidate cand{ambient(c.components, w + ".components", c.name), std::nullopt};
        if (c.a) {
            cand.ag = std::make_pair(Observable(field(*c.a, chart, w + ".a")), Observable(field(*c.g, chart, w + ".g")));
        }
        candidates.push_back(std::move(cand));
    }
    std::vector<GeneratorFamily> families;
    for (std::size_t i = 0; i < cfg_.families.size(); ++i) {
        std::vector<AmbientVectorField> gens;
        for (std::size_t k = 0; k < cfg_.families[i].generators.size(); ++k) {
            gens.push_back(ambient(cfg_.families[i].generators[k],
                                   index_path(index_path("generator_families", i) + ".generators", k),
                                   cfg_.families[i].name + "_" + std::to_string(k + 1)));
        }
        families.emplace_back(cfg_.families[i].name, std::move(gens));
    }

    integration_ = integrate_hamiltonian(sys, ContactPoint::from_vector(cfg_.initial_state), icfg);
    const Trajectory& traj = integration_.trajectory;
    flag("integration", integration_.ok(),
         json{{"nodes", traj.size()}, {"error", integration_.error ? json(*integration_.error) : json(nullptr)}});
    const bool have_traj = integration_.ok() && traj.size() >= 3;

    add_column("t", traj.times);
    for (std::size_t i = 0; i < 2 * n + 1; ++i) {
        std::vector<double> col;
        for (const auto& s : traj.states) {
            col.push_back(s(static_cast<Eigen::Index>(i)));
        }
        add_column(chart[i], std::move(col));
    }
    add_column("H", traj.monitors.at("H"));
    for (const auto& m : icfg.monitors) {
        add_column(m.name, traj.monitors.at(m.name));
    }

    // -R(H) along the nodes and its trapezoidal integral.
    std::vector<double> rate;
    std::vector<double> integral;
    if (have_traj) {
        for (const auto& s : traj.states) {
            rate.push_back(-sys.hamiltonian_at(s).gradient.dot(sys.reeb_at(s)));
        }
        integral.assign(traj.size(), 0.0);
        for (std::size_t k = 1; k < traj.size(); ++k) {
            integral[k] = integral[k - 1] + 0.5 * (traj.times[k] - traj.times[k - 1]) * (rate[k] + rate[k - 1]);
        }
    }
    if (have_traj && cfg_.checks.energy_law) {
        const auto& h = traj.monitors.at("H");
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            worst = std::max(worst, std::abs(h[k] - h[0] * std::exp(integral[k])));
        }
        check("energy law H(t) = H(0) exp(-int R(H))", worst, tol_.energy_law);
    }

    std::optional<SamplePoints> points;
    auto sample = [&]() -> const SamplePoints& {
        if (!points) {
            points = sample_points(sys, sample_);
        }
        return *points;
    };

    if (cfg_.checks.classify) {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const CandidateSpec& spec = cfg_.candidates[i];
            const Candidate& c = candidates[i];
            double residual = 0.0;
            std::string cls;
            Observable f = Observable::constant(0.0, sys.dimension());
            json entry{{"name", spec.name}, {"kind", "contact"}};
            if (c.ag) {
                const CartanSymmetryCheck r = check_cartan_symmetry(sys, c.x, c.ag->first, c.ag->second, sample());
                residual = std::max(r.residual_form, r.residual_energy);
                cls = "cartan";
                f = r.f;
            } else {
                const DynamicalSymmetryCheck r = check_dynamical_symmetry(sys, c.x, sample());
                residual = r.residual;
                cls = "dynamical";
                f = r.f;
            }
            const double tol = tol_.symmetry.exact;
            const Verdict v = judge(residual, tol, tol_.symmetry.fail_factor);
            entry["classes"] = {{cls, {{"verdict", to_string(v)}, {"residual", residual}, {"tolerance", tol}}}};
            entry["dissipated_quantity"] = f.label();
            bool ok = spec.expect.empty() && spec.expect_fail.empty() ? v == Verdict::pass : true;
            for (const auto& e : spec.expect) {
                ok = ok && e == cls && v == Verdict::pass;
            }
            for (const auto& e : spec.expect_fail) {
                ok = ok && e == cls && v == Verdict::fail;
            }
            flag("candidate " + spec.name + ": classification", ok);
            if (v == Verdict::pass) {
                const double d = dissipation_residual(sys, f, sample());
                entry["dissipation_residual"] = measured(d, tol);
                check("candidate " + spec.name + ": f dissipated on the sample", d, tol);
                std::vector<double> fv = along(f);
                if (have_traj && cfg_.checks.trajectory_dissipation) {
                    double rate_res = 0.0;
                    double dev = 0.0;
                    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
                        const double dfdt = (fv[k + 1] - fv[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
                        rate_res = std::max(rate_res, std::abs(dfdt - rate[k] * fv[k]));
                    }
                    for (std::size_t k = 0; k < traj.size(); ++k) {
                        dev = std::max(dev, std::abs(fv[k] * std::exp(-integral[k]) - fv[0]));
                    }
                    entry["trajectory"] = {{"rate_residual", measured(rate_res, tol_.trajectory)},
                                           {"deviation", measured(dev, tol_.trajectory)}};
                    check("candidate " + spec.name + ": f' = -R(H) f along the trajectory", rate_res,
                          tol_.trajectory);
                    check("candidate " + spec.name + ": f exp(int R(H)) constant", dev, tol_.trajectory);
                }
                add_column("f_" + spec.name, std::move(fv));
            }
            candidates_.push_back(std::move(entry));
        }
    }

    if (cfg_.checks.momentum) {
        for (std::size_t i = 0; i < families.size(); ++i) {
            const GeneratorFamily& fam = families[i];
            const FamilySpec& spec = cfg_.families[i];
            const MomentumDissipation md = momentum_dissipation_check(fam, sys, sample(), tol_.invariance);
            const ReebAnnihilation ra = reeb_annihilation_check(fam, sys, sample(), tol_.momentum);
            const std::vector<Observable> j = momentum_components(fam, sys);
            json gens = json::array();
            for (std::size_t k = 0; k < fam.size(); ++k) {
                const std::string label = spec.name + "[" + std::to_string(k + 1) + "]";
                gens.push_back({{"invariance", measured(md.invariance[k], tol_.invariance)},
                                {"dissipation_residual", measured(md.residuals[k], tol_.momentum)},
                                {"reeb_residual", measured(ra.residuals[k], tol_.reeb)},
                                {"lie_derivative_eta", measured(ra.lie_eta[k], tol_.momentum)}});
                if (md.hypothesis_holds) {
                    check("family " + label + ": J dissipated", md.residuals[k], tol_.momentum);
                }
                if (ra.preserves_eta[k]) {
                    check("family " + label + ": R(J) = 0", ra.residuals[k], tol_.reeb);
                }
                add_column("J_" + spec.name + "_" + std::to_string(k + 1), along(j[k]));
            }
            flag("family " + spec.name + ": invariance hypothesis", md.hypothesis_holds == spec.expect_invariant,
                 json{{"holds", md.hypothesis_holds}, {"expected", spec.expect_invariant}});
            families_.push_back({{"name", spec.name}, {"hypothesis_holds", md.hypothesis_holds}, {"generators", gens}});
        }
    }
}

void Runner::run_expectations()
{
    if (!cfg_.checks.expectations) {
        return;
    }
    for (std::size_t i = 0; i < cfg_.expectations.size(); ++i) {
        const ExpectationSpec& e = cfg_.expectations[i];
        const std::string w = index_path("expectations", i);
        const auto it = std::find(columns_.begin(), columns_.end(), e.column);
        if (it == columns_.end()) {
            throw ConfigError(w + ".column", "no column named '" + e.column + "'");
        }
        const ScalarField expected = field(e.expr, Chart{"t"}, w + ".expr");
        const std::vector<double>& values = series_[static_cast<std::size_t>(it - columns_.begin())];
        const std::vector<double>& t = series_.front();
        double worst = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k) {
            const double ref = expected.value(std::span<const double>(&t[k], 1));
            const double d = std::abs(values[k] - ref);
            worst = std::isnan(d) ? d : std::max(worst, d);
            if (std::isnan(worst)) {
                break;
            }
        }
        check("expectation " + e.name + ": " + e.column + " = " + e.expr, worst,
              e.tolerance * options_.tol_scale);
    }
}

ScenarioResult Runner::run()
{
    if (cfg_.system.side == Side::lagrangian) {
        run_lagrangian();
    } else {
        run_hamiltonian();
    }
    run_expectations();

    ScenarioResult out;
    json system{{"side", cfg_.system.side == Side::lagrangian ? "lagrangian" : "hamiltonian"},
                {"n", cfg_.system.n},
                {"expression", cfg_.system.source},
                {"parameters", cfg_.system.parameters}};
    if (!cfg_.system.builtin.empty()) {
        system["builtin"] = cfg_.system.builtin;
    }
    out.report = {{"schema", "contactsim-report"},
                  {"version", report_version},
                  {"provenance", provenance()},
                  {"system", std::move(system)},
                  {"sample", {{"count", sample_.count}, {"box", sample_.half_width}, {"seed", sample_.seed}}},
                  {"integration",
                   {{"ok", integration_.ok()},
                    {"nodes", integration_.trajectory.size()},
                    {"error", integration_.error ? json(*integration_.error) : json(nullptr)}}},
                  {"candidates", std::move(candidates_)},
                  {"generator_families", std::move(families_)},
                  {"checks", std::move(checks_)},
                  {"passed", passed_}};
    out.columns = std::move(columns_);
    out.series = std::move(series_);
    out.passed = passed_;
    return out;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

} // namespace

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string ScenarioResult::csv() const
{
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out += (c ? "," : "") + csv_field(columns[c]);
    }
    out += "\n";
    const std::size_t rows = series.empty() ? 0 : series.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < series.size(); ++c) {
            if (c) {
                out += ",";
            }
            out += r < series[c].size() ? format_number(series[c][r]) : std::string("nan");
        }
        out += "\n";
    }
    return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options)
{
    return Runner(config, options).run();
}

void write_atomically(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace contact::scenario
