#include "contact/scenario.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

using namespace contact;
using namespace contact::scenario;

namespace {

const std::filesystem::path source_dir{CONTACT_SOURCE_DIR};

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string minimal = R"({
  "schema": 1,
  "system": {"builtin": "free_damped_particle", "params": {"gamma": 0.2}},
  "initial_state": {"q": [0.0], "qd": [1.0], "z": 0.0},
  "integrator": {"method": "rk4", "step": 0.01, "t_final": 1.0}
})";

ConfigError config_error(const std::string& text)
{
    try {
        (void)run_scenario(parse_config(text));
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError");
    return ConfigError("", "");
}

std::string with(const std::string& base, const std::string& extra)
{
    const std::size_t close = base.rfind('}');
    return base.substr(0, close) + ",\n" + extra + "\n}";
}

const std::vector<double>& column(const ScenarioResult& r, const std::string& name)
{
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
        if (r.columns[c] == name) {
            return r.series[c];
        }
    }
    FAIL("no column " << name);
    static const std::vector<double> none;
    return none;
}

// Every object carrying a measured "value" also carries its "tolerance".
void require_tolerances(const nlohmann::json& j, const std::string& path, int& measured)
{
    if (j.is_object()) {
        if (j.contains("value")) {
            INFO(path);
            CHECK(j.contains("tolerance"));
            ++measured;
        }
        if (j.contains("residual")) {
            INFO(path);
            CHECK(j.contains("tolerance"));
            ++measured;
        }
        for (const auto& [k, v] : j.items()) {
            require_tolerances(v, path + "." + k, measured);
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            require_tolerances(j[i], path + "[" + std::to_string(i) + "]", measured);
        }
    }
}

} // namespace

TEST_CASE("config: minimal config parses with defaults")
{
    const ScenarioConfig cfg = parse_config(minimal);
    CHECK(cfg.system.side == Side::lagrangian);
    CHECK(cfg.system.builtin == "free_damped_particle");
    CHECK(cfg.initial_state.size() == 3);
    CHECK(cfg.step == 0.01);
    CHECK(cfg.t_final == 1.0);
    CHECK(cfg.candidates.empty());
    CHECK(run_scenario(cfg).passed);
}

TEST_CASE("config: strict shape")
{
    SUBCASE("unknown top-level key")
    {
        try {
            (void)parse_config(with(minimal, R"("candidate": [])"));
            FAIL("accepted an unknown key");
        } catch (const ConfigError& e) {
            CHECK(e.where() == "candidate");
        }
    }
    SUBCASE("unknown nested key")
    {
        const std::string text = R"({"schema": 1,
          "system": {"builtin": "free_damped_particle"},
          "initial_state": {"q": [0.0], "qd": [1.0]},
          "integrator": {"method": "rk4", "step": 0.01, "t_final": 1.0, "order": 4}})";
        try {
            (void)parse_config(text);
            FAIL("accepted an unknown key");
        } catch (const ConfigError& e) {
            CHECK(e.where() == "integrator.order");
        }
    }
    SUBCASE("unsupported schema")
    {
        std::string text = minimal;
        text.replace(text.find("\"schema\": 1"), 11, "\"schema\": 2");
        CHECK_THROWS_AS((void)parse_config(text), ConfigError);
    }
    SUBCASE("missing sections")
    {
        CHECK_THROWS_AS((void)parse_config(R"({"schema": 1})"), ConfigError);
        CHECK_THROWS_AS((void)parse_config("[]"), ConfigError);
    }
    SUBCASE("wrong types")
    {
        std::string text = minimal;
        text.replace(text.find("\"step\": 0.01"), 12, "\"step\": \"x\"");
        CHECK_THROWS_AS((void)parse_config(text), ConfigError);
    }
    SUBCASE("both a builtin and an inline system")
    {
        const std::string text = R"({"schema": 1,
          "system": {"builtin": "free_damped_particle", "lagrangian": "qd1^2"},
          "initial_state": {"q": [0.0], "qd": [1.0]},
          "integrator": {"step": 0.01, "t_final": 1.0}})";
        CHECK_THROWS_AS((void)parse_config(text), ConfigError);
    }
    SUBCASE("unknown symmetry class")
    {
        const std::string text =
            with(minimal, R"("candidates": [{"name": "t", "components": ["1"], "expect": ["conformal"]}])");
        CHECK_THROWS_AS((void)parse_config(text), ConfigError);
    }
    SUBCASE("Hamiltonian-side momentum key")
    {
        const std::string text = R"({"schema": 1,
          "system": {"hamiltonian": "p1^2/2", "n": 1},
          "initial_state": {"q": [0.0], "qd": [1.0]},
          "integrator": {"step": 0.01, "t_final": 1.0}})";
        try {
            (void)parse_config(text);
            FAIL("accepted qd on the Hamiltonian side");
        } catch (const ConfigError& e) {
            CHECK(e.where() == "initial_state.qd");
        }
    }
}

TEST_CASE("config: malformed JSON reports a byte offset")
{
    const std::string text = "{\"schema\": 1, \"system\": }";
    try {
        (void)parse_config(text);
        FAIL("accepted malformed JSON");
    } catch (const ConfigError& e) {
        REQUIRE(e.byte_offset().has_value());
        CHECK(*e.byte_offset() == text.find('}'));
    }
}

TEST_CASE("config: malformed expression reports the byte offset of the error")
{
    const std::filesystem::path path = source_dir / "tests/data/malformed_expression.json";
    const std::string text = read_file(path);
    const ScenarioConfig cfg = load_config(path);
    try {
        (void)run_scenario(cfg);
        FAIL("accepted a malformed Lagrangian");
    } catch (const ConfigError& e) {
        CHECK(e.where() == "system.lagrangian");
        REQUIRE(e.byte_offset().has_value());
        const std::size_t start = text.find("0.5*qd1^ + 1");
        CHECK(*e.byte_offset() == start + 9);
        CHECK(text[*e.byte_offset()] == '+');
    }
}

TEST_CASE("config: expression errors in candidates and monitors")
{
    SUBCASE("candidate component")
    {
        const std::string text =
            with(minimal, R"("candidates": [{"name": "t", "kind": "on_Q", "components": ["sin("]}])");
        const ConfigError e = config_error(text);
        CHECK(e.where() == "candidates[0].components[0]");
        REQUIRE(e.byte_offset().has_value());
        CHECK(*e.byte_offset() == text.find("sin(") + 4);
    }
    SUBCASE("monitor using a variable outside the chart")
    {
        const std::string text = with(minimal, R"("monitors": [{"name": "m", "expr": "p1*q1"}])");
        const ConfigError e = config_error(text);
        CHECK(e.where() == "monitors[0].expr");
    }
    SUBCASE("candidate with the wrong number of components")
    {
        const std::string text =
            with(minimal, R"("candidates": [{"name": "t", "kind": "on_Q", "components": ["1", "0"]}])");
        CHECK_THROWS_AS((void)run_scenario(parse_config(text)), ConfigError);
    }
    SUBCASE("expectation on a missing column")
    {
        const std::string text =
            with(minimal, R"("expectations": [{"column": "nope", "expr": "0", "tolerance": 1}])");
        const ConfigError e = config_error(text);
        CHECK(e.where() == "expectations[0].column");
    }
    SUBCASE("initial state of the wrong dimension")
    {
        std::string text = minimal;
        text.replace(text.find("\"q\": [0.0]"), 10, "\"q\": [0.0, 1.0]");
        CHECK_THROWS_AS((void)run_scenario(parse_config(text)), ConfigError);
    }
}

TEST_CASE("builtins: catalog and instances")
{
    const auto& catalog = builtin_catalog();
    std::vector<std::string> names;
    for (const auto& b : catalog) {
        names.push_back(b.name);
        CHECK_FALSE(b.summary.empty());
        CHECK_FALSE(b.lagrangian_doc.empty());
    }
    CHECK(std::find(names.begin(), names.end(), "free_damped_particle") != names.end());
    CHECK(std::find(names.begin(), names.end(), "damped_oscillator") != names.end());
    CHECK(std::find(names.begin(), names.end(), "central_potential_damped") != names.end());

    const std::string text = catalog_text();
    for (const auto& n : names) {
        CHECK(text.find(n) != std::string::npos);
    }

    CHECK_THROWS_AS((void)instantiate_builtin("pendulum", {}), ConfigError);
    CHECK_THROWS_AS((void)instantiate_builtin("free_damped_particle", {{"mass", 1.0}}), ConfigError);
    CHECK_THROWS_AS((void)instantiate_builtin("free_damped_particle", {{"n", 1.5}}), ConfigError);
    CHECK_THROWS_AS((void)instantiate_builtin("free_damped_particle", {{"n", 0.0}}), ConfigError);

    const BuiltinInstance fp = instantiate_builtin("free_damped_particle", {{"n", 3.0}});
    CHECK(fp.n == 3);
    CHECK(fp.parameters.at("gamma") == 0.2);
}

TEST_CASE("builtins: every documented symmetry passes its class")
{
    const std::vector<std::pair<std::string, std::map<std::string, double>>> cases{
        {"free_damped_particle", {{"n", 1.0}}},
        {"free_damped_particle", {{"n", 3.0}, {"gamma", 0.7}}},
        {"damped_oscillator", {}},
        {"damped_oscillator", {{"n", 3.0}, {"omega", 2.0}}},
        {"central_potential_damped", {}},
    };
    for (const auto& [name, params] : cases) {
        const BuiltinInstance inst = instantiate_builtin(name, params);
        const LagrangianSystem sys = LagrangianSystem::parse(inst.lagrangian, inst.n, inst.parameters);
        const SamplePoints pts = sample_regular_points(sys, SampleSpec{60, 1.0, 5});
        REQUIRE_FALSE(inst.symmetries.empty());
        for (const auto& s : inst.symmetries) {
            INFO(name << " " << s.name);
            SymmetryCandidate cand{s.name, VectorFieldQR::parse(s.components, s.z_component), std::nullopt};
            if (s.z_component == "0") {
                cand.field = VectorFieldQ::parse(s.components);
            }
            const SymmetryReport r = classify(sys, cand, pts);
            const auto it = std::find_if(all_symmetry_classes.begin(), all_symmetry_classes.end(),
                                         [&](SymmetryClass c) { return to_string(c) == s.expected_class; });
            REQUIRE(it != all_symmetry_classes.end());
            CHECK(r[*it].verdict == Verdict::pass);
            CHECK(r.dissipation_residual <= r.dissipation_tolerance);
        }
    }
}

TEST_CASE("run: damped free particle scenario")
{
    const ScenarioConfig cfg = load_config(source_dir / "scenarios/damped_free_particle.json");
    const ScenarioResult r = run_scenario(cfg);
    CHECK(r.passed);
    CHECK(r.report["passed"].get<bool>());

    const auto& t = column(r, "t");
    const auto& p = column(r, "p");
    REQUIRE(t.size() == 5001);
    double worst = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        worst = std::max(worst, std::abs(p[k] - std::exp(-0.2 * t[k])));
    }
    CHECK(worst <= 1e-8);

    const auto& ratio = column(r, "f_translation/E_L");
    for (double x : ratio) {
        CHECK(std::abs(x - 2.0) <= 1e-9);
    }

    for (const auto& c : r.report["candidates"]) {
        if (c["name"] == "scaling") {
            CHECK(c["selected"] == "generalized");
            CHECK(c["classes"]["infinitesimal"]["verdict"] == "fail");
        }
        if (c["name"] == "q_scaling") {
            CHECK(c["selected"].is_null());
        }
    }
}

TEST_CASE("run: damped oscillator rotation scenario")
{
    const ScenarioResult r = run_scenario(load_config(source_dir / "scenarios/damped_oscillator_rotation.json"));
    CHECK(r.passed);
    const auto& t = column(r, "t");
    const auto& ell = column(r, "ell");
    const auto& f = column(r, "f_rotation");
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(std::abs(ell[k] - std::exp(-0.1 * t[k])) <= 1e-6);
        CHECK(std::abs(f[k] - ell[k]) <= 1e-12);
    }
    for (const auto& c : r.report["candidates"]) {
        if (c["name"] == "rotation") {
            CHECK(c["classes"]["infinitesimal"]["residual"].get<double>() <= 1e-12);
            CHECK(c["quotient_deviation"]["value"].get<double>() <= 1e-6);
        }
    }
}

TEST_CASE("run: Hamiltonian-side scenario")
{
    const ScenarioResult r = run_scenario(load_config(source_dir / "tests/data/contact_oscillator.json"));
    CHECK(r.passed);
    CHECK(r.report["system"]["side"] == "hamiltonian");
    const auto& t = column(r, "t");
    const auto& h = column(r, "H");
    for (std::size_t k = 0; k < t.size(); k += 100) {
        CHECK(std::abs(h[k] - std::exp(-0.1 * t[k])) <= 1e-7);
    }
    for (const auto& c : r.report["candidates"]) {
        if (c["name"] == "reeb") {
            CHECK(c["classes"]["dynamical"]["verdict"] == "fail");
        }
        if (c["name"] == "rotation") {
            CHECK(c["classes"]["dynamical"]["verdict"] == "pass");
        }
    }
}

TEST_CASE("run: a violated expectation fails the run")
{
    const ScenarioResult r = run_scenario(load_config(source_dir / "tests/data/failing_expectation.json"));
    CHECK_FALSE(r.passed);
    bool found = false;
    for (const auto& c : r.report["checks"]) {
        if (c["name"].get<std::string>().find("undamped momentum") != std::string::npos) {
            found = true;
            CHECK_FALSE(c["pass"].get<bool>());
        }
    }
    CHECK(found);
}

TEST_CASE("report: schema, version, provenance and tolerances")
{
    const ScenarioResult r = run_scenario(load_config(source_dir / "scenarios/damped_free_particle.json"));
    const nlohmann::json& j = r.report;
    CHECK(j["schema"] == "contactsim-report");
    CHECK(j["version"] == report_version);
    CHECK(j["provenance"]["method"] == "rk4");
    CHECK(j["provenance"]["seed"] == 7);
    CHECK(j["provenance"]["step"] == 0.001);
    CHECK(j["provenance"]["tol_scale"] == 1.0);
    CHECK(j["system"]["builtin"] == "free_damped_particle");
    CHECK(j["integration"]["ok"].get<bool>());
    for (const char* key :
         {"candidates", "checks", "generator_families", "integration", "passed", "provenance", "sample", "system"}) {
        CHECK(j.contains(key));
    }
    int measured = 0;
    require_tolerances(j, "", measured);
    CHECK(measured > 20);

    const nlohmann::json reparsed = nlohmann::json::parse(j.dump(2));
    CHECK(reparsed == j);
}

TEST_CASE("report: tol_scale and seed override")
{
    const ScenarioConfig cfg = load_config(source_dir / "scenarios/damped_free_particle.json");
    RunOptions opts;
    opts.tol_scale = 3.0;
    opts.seed = 99;
    const ScenarioResult base = run_scenario(cfg);
    const ScenarioResult scaled = run_scenario(cfg, opts);
    CHECK(scaled.report["provenance"]["tol_scale"] == 3.0);
    CHECK(scaled.report["provenance"]["seed"] == 99);
    CHECK(scaled.report["sample"]["seed"] == 99);
    const auto& b = base.report["candidates"][0]["classes"]["infinitesimal"];
    const auto& s = scaled.report["candidates"][0]["classes"]["infinitesimal"];
    CHECK(s["tolerance"].get<double>() == doctest::Approx(3.0 * b["tolerance"].get<double>()));
    CHECK(scaled.passed);
    for (std::size_t i = 0; i < base.report["checks"].size(); ++i) {
        const auto& bc = base.report["checks"][i];
        const auto& sc = scaled.report["checks"][i];
        CHECK(bc["name"] == sc["name"]);
        if (bc.contains("tolerance")) {
            CHECK(sc["tolerance"].get<double>() == doctest::Approx(3.0 * bc["tolerance"].get<double>()));
        }
    }

    // the trajectory does not depend on the sample
    CHECK(base.series == scaled.series);
}

TEST_CASE("report: deterministic for a fixed seed")
{
    const ScenarioConfig cfg = load_config(source_dir / "scenarios/damped_oscillator_rotation.json");
    const ScenarioResult a = run_scenario(cfg);
    const ScenarioResult b = run_scenario(cfg);
    CHECK(a.csv() == b.csv());
    CHECK(a.report.dump() == b.report.dump());
}

TEST_CASE("csv: header and loss-free numbers")
{
    const ScenarioResult r = run_scenario(load_config(source_dir / "scenarios/damped_free_particle.json"));
    const std::string csv = r.csv();
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,q1,qd1,z,E_L,p,f_translation,f_translation/E_L,f_scaling,f_scaling/E_L,J_translations_1");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(cells, cell, ',')) {
            REQUIRE(c < r.series.size());
            const double x = std::strtod(cell.c_str(), nullptr);
            if (x != r.series[c][row]) {
                FAIL("row " << row << " column " << r.columns[c] << " lost precision");
            }
            ++c;
        }
        CHECK(c == r.columns.size());
        ++row;
    }
    CHECK(row == r.series.front().size());
}

TEST_CASE("csv: quoting of column names")
{
    ScenarioResult r;
    r.columns = {"a", "b,c", "d\"e"};
    r.series = {{1.0}, {2.0}, {3.0}};
    CHECK(r.csv() == "a,\"b,c\",\"d\"\"e\"\n1,2,3\n");
}

TEST_CASE("format_number round trips")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::ldexp(mantissa(rng), exponent(rng));
        CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
    }
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
}

TEST_CASE("write_atomically")
{
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "contactsim_write_test";
    std::filesystem::remove_all(dir);
    const std::filesystem::path target = dir / "nested" / "out.txt";
    write_atomically(target, "first\n");
    CHECK(read_file(target) == "first\n");
    write_atomically(target, "second\n");
    CHECK(read_file(target) == "second\n");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(target.parent_path())) {
        ++entries;
    }
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("load_config resolves output paths against the config directory")
{
    const ScenarioConfig cfg = load_config(source_dir / "scenarios/damped_free_particle.json");
    CHECK(cfg.output.csv == source_dir / "scenarios/out/damped_free_particle.csv");
    CHECK(cfg.output.report == source_dir / "scenarios/out/damped_free_particle.report.json");
    CHECK_THROWS_AS((void)load_config(source_dir / "scenarios/missing.json"), ConfigError);
}
