#pragma once

// Vertical and complete lifts of vector fields on Q and on Q x R to TQ x R.
//
//   Y   = Y^i(q) d/dq^i                     Y^V = Y^i d/dqd^i
//                                           Y^C = Y^i d/dq^i + qd^j dY^i/dq^j d/dqd^i
//   Y   = Y^i(q, z) d/dq^i + Z(z) d/dz      restricted complete lift adds Z d/dz
//
// Z may not depend on q; otherwise the complete lift is not tangent to
// TQ x R (qd_z = 0). That is enforced when the field is built.

#include "contact/fields.hpp"
#include "contact/lagrangian.hpp"

#include <stdexcept>

namespace contact {

/// Raised when a component depends on variables its field type does not allow.
class TangencyError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Y = Y^i(q) d/dq^i; components are fields over configuration_chart(n).
class VectorFieldQ
{
public:
    VectorFieldQ(std::size_t n, std::vector<ScalarField> components);

    static VectorFieldQ parse(const std::vector<std::string>& components, const Parameters& parameters = {});
    static VectorFieldQ zero(std::size_t n);

    [[nodiscard]] std::size_t n() const noexcept { return components_.size(); }
    [[nodiscard]] const std::vector<ScalarField>& components() const noexcept { return components_; }

private:
    std::vector<ScalarField> components_;
};

/// Y = Y^i(q, z) d/dq^i + Z(z) d/dz; q components over extended_configuration_chart(n),
/// the z component over the chart {z}.
class VectorFieldQR
{
public:
    VectorFieldQR(std::size_t n, std::vector<ScalarField> q_components, ScalarField z_component);
    /// Embeds a field on Q (zero z component).
    explicit VectorFieldQR(const VectorFieldQ& y);

    static VectorFieldQR parse(const std::vector<std::string>& q_components, const std::string& z_component,
                               const Parameters& parameters = {});

    [[nodiscard]] std::size_t n() const noexcept { return q_components_.size(); }
    [[nodiscard]] const std::vector<ScalarField>& q_components() const noexcept { return q_components_; }
    [[nodiscard]] const ScalarField& z_component() const noexcept { return z_component_; }

private:
    std::vector<ScalarField> q_components_;
    ScalarField z_component_;
};

TQRTangent vertical_lift_Q(const VectorFieldQ& y, const TQRPoint& x);
TQRTangent complete_lift_Q(const VectorFieldQ& y, const TQRPoint& x);
TQRTangent complete_lift_QR(const VectorFieldQR& y, const TQRPoint& x);
TQRTangent vertical_lift_QR(const VectorFieldQR& y, const TQRPoint& x);

/// The lifts as vector fields on the (q, qd, z) chart, with Jacobians, so that
/// the generic contact checks apply to them unchanged.
AmbientVectorField complete_lift_field(const VectorFieldQR& y);
AmbientVectorField vertical_lift_field(const VectorFieldQR& y);
AmbientVectorField complete_lift_field(const VectorFieldQ& y);
AmbientVectorField vertical_lift_field(const VectorFieldQ& y);

/// X(f) as an observable; needs the Hessian of f for its gradient.
Observable apply_field(const AmbientVectorField& x, const ScalarField& f);

/// Z viewed as an observable on the (q, qd, z) chart.
Observable z_component_observable(const VectorFieldQR& y);

} // namespace contact
