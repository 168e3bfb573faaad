#pragma once

// JSON scenarios: a system, an initial state, an integrator, candidate
// symmetries, generator families and expectations. A run produces the
// CSV series and a versioned JSON report.

#include "contact/integrate.hpp"
#include "contact/momentum.hpp"
#include "contact/symmetry.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace contact::scenario {

inline constexpr int report_version = 1;

/// Invalid configuration. `where` is a JSON path such as candidates[0].components[1].
class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string where, const std::string& message, std::optional<std::size_t> byte_offset = {});

    [[nodiscard]] const std::string& where() const noexcept { return where_; }
    /// Byte offset into the configuration file, when it can be determined.
    [[nodiscard]] std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

private:
    std::string where_;
    std::optional<std::size_t> byte_offset_;
};

// ---------------------------------------------------------------------------
// Builtin systems
// ---------------------------------------------------------------------------

struct BuiltinParameter
{
    std::string name;
    double default_value = 0.0;
    bool integer = false;
    std::string description;
};

struct BuiltinSymmetry
{
    std::string name;
    std::vector<std::string> components; // in q1..qn (and z)
    std::string z_component;             // "0" for fields on Q
    std::string expected_class;
};

struct BuiltinInfo
{
    std::string name;
    std::string summary;
    std::vector<BuiltinParameter> parameters;
    std::string lagrangian_doc;
    std::string oracle_doc;
};

struct BuiltinInstance
{
    std::size_t n = 1;
    std::string lagrangian;
    Parameters parameters;
    std::vector<BuiltinSymmetry> symmetries;
};

const std::vector<BuiltinInfo>& builtin_catalog();
/// Throws ConfigError for unknown names, unknown or ill-typed parameters.
BuiltinInstance instantiate_builtin(const std::string& name, const std::map<std::string, double>& values);
std::string catalog_text();

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class Side
{
    lagrangian,
    hamiltonian,
};

struct SystemSpec
{
    Side side = Side::lagrangian;
    std::string builtin; // empty for inline systems
    std::size_t n = 1;
    std::string source;
    Parameters parameters;
};

struct NamedExpression
{
    std::string name;
    std::string expr;
};

struct CandidateSpec
{
    std::string name;
    bool on_q = true; // kind "on_Q" or "on_QxR"; always false on the Hamiltonian side
    std::vector<std::string> components;
    std::string z_component = "0";
    std::optional<std::string> a;
    std::optional<std::string> g;
    std::vector<std::string> expect;      // classes that must pass
    std::vector<std::string> expect_fail; // classes that must certifiably fail
};

struct FamilySpec
{
    std::string name;
    std::vector<std::vector<std::string>> generators;
    bool shift_z = false;
    bool expect_invariant = true;
};

struct ExpectationSpec
{
    std::string name;
    std::string column;
    std::string expr; // in t and the system parameters
    double tolerance = 0.0;
};

struct Checks
{
    bool classify = true;
    bool trajectory_dissipation = true;
    bool quotients = true;
    bool momentum = true;
    bool herglotz = true;
    bool energy_law = true;
    bool expectations = true;
};

struct OutputSpec
{
    std::filesystem::path csv;
    std::filesystem::path report;
};

struct ScenarioConfig
{
    std::string origin; // file the config came from, for messages
    std::string text;   // raw JSON, for byte offsets
    SystemSpec system;
    Eigen::VectorXd initial_state; // (q, qd or p, z)
    Method method = Method::rk4;
    double step = 1e-3;
    double t_final = 1.0;
    std::vector<NamedExpression> monitors;
    std::vector<CandidateSpec> candidates;
    std::vector<FamilySpec> families;
    Checks checks;
    SampleSpec sample;
    OutputSpec output;
    std::vector<ExpectationSpec> expectations;
};

/// Parses and validates the JSON shape; expressions are checked by run_scenario.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");
/// Relative output paths are resolved against the config file's directory.
ScenarioConfig load_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct RunOptions
{
    std::optional<std::uint64_t> seed;
    double tol_scale = 1.0;
};

/// Base tolerances; all are multiplied by RunOptions::tol_scale.
struct Tolerances
{
    SymmetryTolerances symmetry;
    double trajectory = 1e-6;
    double quotient = 1e-6;
    double energy_law = 1e-6;
    double herglotz = 1e-5;
    double momentum = exact_tolerance;
    double reeb = 1e-10;
    double invariance = exact_tolerance;
    double consistency = 1e-12;
};

struct ScenarioResult
{
    nlohmann::json report;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> series; // one per column
    bool passed = false;

    [[nodiscard]] std::string csv() const;
};

/// Throws ConfigError when an expression fails to parse or dimensions disagree.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// %.17g
std::string format_number(double x);

} // namespace contact::scenario
