#pragma once

// Lagrangian symmetries and their dissipated quantities, in increasing order of
// generality:
//
//   infinitesimal   Y on Q,      Y^C(L) = 0                          f = Y^V(L)
//   generalized     Y on Q x R,  Ybar^C(L) = -R_L(f) L               f = Ybar^V(L) - Z
//   Noether         Ybar^C Cartan for (eta_L, E_L) with data (a, g)  f = Ybar^V(L) - Z + g
//   Lie             Ybar^C dynamical for xi_L                        f = Ybar^V(L) - Z
//
// Each f satisfies xi_L(f) = (dL/dz) f.

#include "contact/lifts.hpp"
#include "contact/sampling.hpp"

#include <array>
#include <optional>
#include <string>
#include <variant>

namespace contact {

struct ResidualWithField
{
    double residual = 0.0;
    Observable f;
};

struct NoetherCheck
{
    double residual_form = 0.0;   // max |L_{Ybar^C} eta_L - a eta_L - dg|
    double residual_energy = 0.0; // max |Ybar^C(E_L) - a E_L - g R_L(E_L)|
    Observable f;
};

/// max |Y^C(L)|.
double infinitesimal_symmetry_residual(const LagrangianSystem& sys, const VectorFieldQ& y, const SamplePoints& points);

/// Y^V(L).
Observable dissipated_for_infinitesimal(const LagrangianSystem& sys, const VectorFieldQ& y);

/// Ybar^V(L) - Z, which equals -eta_L(Ybar^C).
Observable dissipated_for_lift(const LagrangianSystem& sys, const VectorFieldQR& y);

/// max |Ybar^C(L) + R_L(f) L| with f = Ybar^V(L) - Z.
ResidualWithField generalized_symmetry_residual(const LagrangianSystem& sys, const VectorFieldQR& y,
                                                const SamplePoints& points);

/// Cartan check of Ybar^C on (TQ x R, eta_L, E_L); a and g live on the (q, qd, z) chart.
NoetherCheck noether_symmetry_check(const LagrangianSystem& sys, const VectorFieldQR& y, const Observable& a,
                                    const Observable& g, const SamplePoints& points);

/// max |eta_L([xi_L, Ybar^C])|. Throws RegularityError at singular points.
ResidualWithField lie_symmetry_residual(const LagrangianSystem& sys, const VectorFieldQR& y,
                                        const SamplePoints& points);

struct TrajectoryDissipation
{
    double rate_residual = 0.0; // max over interior nodes of |df/dt - (dL/dz) f|
    double deviation = 0.0;     // max |f(t) exp(-int_0^t dL/dz) - f(0)|
};

/// Throws std::invalid_argument for fewer than 3 nodes.
TrajectoryDissipation dissipation_check_along_trajectory(const LagrangianSystem& sys, const Observable& f,
                                                         const Trajectory& traj);

/// G(t) = exp(-int_0^t dL/dz) f(t), trapezoidal rule on the nodes.
std::vector<double> georgieva_functional(const LagrangianSystem& sys, const Observable& f, const Trajectory& traj);

/// max |f/E_L(t) - f/E_L(0)|; std::nullopt when |E_L| < min_energy somewhere on traj.
std::optional<double> quotient_deviation(const LagrangianSystem& sys, const Observable& f, const Trajectory& traj,
                                         double min_energy = 1e-6);

/// int_0^{t_k} dL/dz along traj by the trapezoidal rule, one value per node.
std::vector<double> z_rate_integral(const LagrangianSystem& sys, const Trajectory& traj);

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class SymmetryClass
{
    infinitesimal,
    generalized,
    noether,
    lie,
};

inline constexpr std::array<SymmetryClass, 4> all_symmetry_classes{
    SymmetryClass::infinitesimal, SymmetryClass::generalized, SymmetryClass::noether, SymmetryClass::lie};

std::string to_string(SymmetryClass c);

enum class Verdict
{
    pass,
    fail,
    indeterminate, // between tol and 100 tol
    not_tested,
};

std::string to_string(Verdict v);

struct SymmetryTolerances
{
    double exact = exact_tolerance;
    double lie = finite_difference_tolerance;
    /// A failure is certified only when the residual exceeds this multiple of the tolerance.
    double fail_factor = 100.0;

    [[nodiscard]] SymmetryTolerances scaled(double s) const { return {exact * s, lie * s, fail_factor}; }
};

Verdict judge(double residual, double tolerance, double fail_factor);

struct CartanData
{
    Observable a;
    Observable g;
};

struct SymmetryCandidate
{
    std::string name;
    std::variant<VectorFieldQ, VectorFieldQR> field;
    /// Noether data; when absent the Noether check runs with a = 0, g = 0.
    std::optional<CartanData> cartan_data;

    [[nodiscard]] bool on_q() const noexcept { return std::holds_alternative<VectorFieldQ>(field); }
    [[nodiscard]] VectorFieldQR as_qr() const;
};

struct ClassResult
{
    Verdict verdict = Verdict::not_tested;
    double residual = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct SymmetryReport
{
    std::string candidate;
    std::array<ClassResult, 4> classes; // indexed by SymmetryClass
    std::optional<SymmetryClass> selected;
    Observable dissipated_field = Observable::constant(0.0, 1);
    double dissipation_residual = 0.0;
    double dissipation_tolerance = 0.0;
    std::optional<TrajectoryDissipation> trajectory;
    std::size_t sample_count = 0;
    SampleSpec sample;

    [[nodiscard]] const ClassResult& operator[](SymmetryClass c) const
    {
        return classes[static_cast<std::size_t>(c)];
    }
};

/// Runs every check. A candidate on Q x R that is not a field on Q fails the
/// infinitesimal class whatever its residual max |Ybar^C(L)|.
/// f follows the most specific passing class (Ybar^V(L) - Z when none passes).
SymmetryReport classify(const LagrangianSystem& sys, const SymmetryCandidate& candidate, const SamplePoints& points,
                        const Trajectory* traj = nullptr, const SymmetryTolerances& tol = {},
                        const SampleSpec& sample = {});

} // namespace contact
