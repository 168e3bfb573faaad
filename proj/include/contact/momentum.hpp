#pragma once

// Momentum maps of finite families of infinitesimal generators.
//
//   J(xi)(x) = -eta_x(xi_M(x))
//
// On the Lagrangian side a family is given by fields on Q and acts on TQ x R
// through their complete lifts, so J(xi) = -eta_L(xi^C) = xi^V(L).

#include "contact/lifts.hpp"

#include <variant>

namespace contact {

class GeneratorFamily
{
public:
    /// Generators already on the contact manifold's chart.
    GeneratorFamily(std::string label, std::vector<AmbientVectorField> generators);
    /// Point action on Q lifted to TQ x R. With `shift_z` each lift gets an extra d/dz.
    GeneratorFamily(std::string label, std::vector<VectorFieldQ> generators, bool shift_z = false);

    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::size_t size() const noexcept { return fields_.size(); }
    [[nodiscard]] bool lifted() const noexcept { return lifted_; }
    [[nodiscard]] bool shift_z() const noexcept { return shift_z_; }
    [[nodiscard]] std::size_t dimension() const { return fields_.front().dimension(); }

    /// The generators xi_M as fields on the chart.
    [[nodiscard]] const std::vector<AmbientVectorField>& fields() const noexcept { return fields_; }
    /// The Q fields of a lifted family; empty otherwise.
    [[nodiscard]] const std::vector<VectorFieldQ>& base_fields() const noexcept { return base_; }

private:
    std::string label_;
    std::vector<AmbientVectorField> fields_;
    std::vector<VectorFieldQ> base_;
    bool lifted_ = false;
    bool shift_z_ = false;
};

/// Component k is -eta(xi_k) at x.
Eigen::VectorXd momentum_map_at(const GeneratorFamily& fam, const ContactStructure& s, const Point& x);
Eigen::VectorXd momentum_map_at(const GeneratorFamily& fam, const LagrangianSystem& sys, const TQRPoint& x);

/// J(xi_k) as observables.
std::vector<Observable> momentum_components(const GeneratorFamily& fam, const ContactStructure& s);

struct MomentumDissipation
{
    bool hypothesis_holds = true;
    std::vector<double> invariance; // max |xi_k(H)| per generator
    std::vector<double> residuals;  // max |X_H(J(xi_k)) + R(H) J(xi_k)| per generator
    double tolerance = exact_tolerance;
};

/// Residuals are computed even when the invariance hypothesis fails.
MomentumDissipation momentum_dissipation_check(const GeneratorFamily& fam, const ContactSystem& sys,
                                               const SamplePoints& points, double tolerance = exact_tolerance);

struct ReebAnnihilation
{
    std::vector<double> residuals;    // max |R(J(xi_k))|
    std::vector<double> lie_eta;      // max |L_{xi_k} eta|_inf
    std::vector<bool> preserves_eta;  // lie_eta <= tolerance
    double tolerance = exact_tolerance;
};

ReebAnnihilation reeb_annihilation_check(const GeneratorFamily& fam, const ContactStructure& s,
                                         const SamplePoints& points, double tolerance = exact_tolerance);

} // namespace contact
