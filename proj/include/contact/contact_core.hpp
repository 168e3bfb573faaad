#pragma once

/**
 * @file contact_core.hpp
 * @brief Contact geometry on a chart: contact form, Reeb field, the flat
 * isomorphism, Hamiltonian vector fields, the Jacobi bracket and the
 * symmetry/dissipation checks built on them.
 *
 * Two layers live here. The generic layer works on any chart where the
 * contact form is known pointwise together with its first derivatives
 * (ContactFormJet); it is shared by the Darboux chart (q, p, z) and by the
 * Lagrangian chart (q, qd, z). The Darboux layer wraps it with split
 * (q, p, z) value types and closed-form expressions.
 *
 * Conventions on the Darboux chart, with coordinates ordered q1..qn, p1..pn, z:
 *   eta   = dz - p_i dq^i
 *   d eta = dq^i ^ dp_i
 *   flat(v) = i_v d eta + eta(v) eta
 *   X_H = H_p d/dq - (H_q + p H_z) d/dp + (p.H_p - H) d/dz
 */

#include "contact/fields.hpp"

#include <memory>
#include <vector>

namespace contact {

inline constexpr double exact_tolerance = 1e-8;
inline constexpr double finite_difference_tolerance = 1e-4;

// ---------------------------------------------------------------------------
// Generic layer
// ---------------------------------------------------------------------------

/// Contact form coefficients and their derivatives; jacobian(k, j) = d eta_k / dx^j.
struct ContactFormJet
{
    Eigen::VectorXd eta;
    Eigen::MatrixXd jacobian;
};

/// Matrix D of the 2-form d eta: d eta(v, w) = v^T D w.
Eigen::MatrixXd exterior_derivative(const ContactFormJet& form);

/// i_v d eta as a covector.
Eigen::VectorXd interior_d_eta(const ContactFormJet& form, const Eigen::VectorXd& v);

/// The matrix of v -> i_v d eta + eta(v) eta.
Eigen::MatrixXd flat_matrix(const ContactFormJet& form);

Eigen::VectorXd flat(const ContactFormJet& form, const Eigen::VectorXd& v);

/// Solves flat(v) = alpha; throws std::domain_error if the form is degenerate at the point.
Eigen::VectorXd flat_inverse(const ContactFormJet& form, const Eigen::VectorXd& alpha);

/// L_X eta = i_X d eta + d(eta(X)), from first derivatives of eta and X.
Eigen::VectorXd lie_derivative(const ContactFormJet& form, const FieldJet& x);

/// [X, Y]^k = X(Y^k) - Y(X^k).
Eigen::VectorXd lie_bracket(const FieldJet& x, const FieldJet& y);

class ContactStructure
{
public:
    virtual ~ContactStructure() = default;

    [[nodiscard]] virtual std::size_t dimension() const = 0;
    [[nodiscard]] virtual ContactFormJet form_at(const Point& x) const = 0;
    [[nodiscard]] virtual Eigen::VectorXd reeb_at(const Point& x) const = 0;

    /// X_f at x from the first-order data of f. The default solves the flat equation.
    [[nodiscard]] virtual Eigen::VectorXd hamiltonian_vf_of(const Jet1& f, const Point& x) const;

    /// A heap copy, used by observables that must outlive the caller's reference.
    [[nodiscard]] virtual std::shared_ptr<const ContactStructure> share() const = 0;
};

/// A contact structure with a Hamiltonian: (M, eta, H).
class ContactSystem : public ContactStructure
{
public:
    [[nodiscard]] virtual Jet1 hamiltonian_at(const Point& x) const = 0;
    [[nodiscard]] virtual Eigen::VectorXd hamiltonian_vf_at(const Point& x) const = 0;
    [[nodiscard]] virtual FieldJet hamiltonian_vf_jet_at(const Point& x) const = 0;

    [[nodiscard]] std::shared_ptr<const ContactSystem> share_system() const;
};

/// {f, g} = X_f(g) + g R(f).
double jacobi_bracket(const ContactStructure& s, const Jet1& f, const Jet1& g, const Point& x);

/// Observable x -> {f, g}(x); its gradient is taken by central differences with the given step.
Observable bracket_observable(const ContactStructure& s, const Observable& f, const Observable& g,
                              double step = 1e-4);

/// -eta(X) as an observable (the candidate dissipated quantity of a dynamical symmetry).
Observable minus_eta_of(const ContactStructure& s, const AmbientVectorField& x);

/// max over points of |X_H(f) + R(H) f|. Throws std::invalid_argument on an empty sample.
double dissipation_residual(const ContactSystem& sys, const Observable& f, const SamplePoints& points);

struct ConformalCheck
{
    bool is_conformal = false;
    std::vector<double> a_values;
    double residual = 0.0;
};

/// Fits L_X eta = a eta pointwise with a = (L_X eta)(R).
ConformalCheck check_conformal_contactomorphism(const ContactStructure& s, const AmbientVectorField& x,
                                                const SamplePoints& points, double tolerance = exact_tolerance);

struct DynamicalSymmetryCheck
{
    double residual = 0.0; // max |eta([X_H, X])|
    Observable f;          // -eta(X)
};

DynamicalSymmetryCheck check_dynamical_symmetry(const ContactSystem& sys, const AmbientVectorField& x,
                                                const SamplePoints& points);

struct CartanSymmetryCheck
{
    double residual_form = 0.0;   // max |L_X eta - a eta - dg|_inf
    double residual_energy = 0.0; // max |X(H) - a H - g R(H)|
    Observable f;                 // eta(X) - g
};

CartanSymmetryCheck check_cartan_symmetry(const ContactSystem& sys, const AmbientVectorField& x, const Observable& a,
                                          const Observable& g, const SamplePoints& points);

// ---------------------------------------------------------------------------
// Darboux chart
// ---------------------------------------------------------------------------

struct ContactPoint
{
    Eigen::VectorXd q;
    Eigen::VectorXd p;
    double z = 0.0;

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(q.size()); }
    [[nodiscard]] Point to_vector() const;
    static ContactPoint from_vector(const Point& x);
};

struct TangentValue
{
    Eigen::VectorXd dq;
    Eigen::VectorXd dp;
    double dz = 0.0;

    [[nodiscard]] Eigen::VectorXd to_vector() const;
    static TangentValue from_vector(const Eigen::VectorXd& v);
};

struct OneFormValue
{
    Eigen::VectorXd cq;
    Eigen::VectorXd cp;
    double cz = 0.0;

    [[nodiscard]] Eigen::VectorXd to_vector() const;
    static OneFormValue from_vector(const Eigen::VectorXd& v);
};

class DarbouxStructure : public ContactStructure
{
public:
    explicit DarbouxStructure(std::size_t n);

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t dimension() const override { return 2 * n_ + 1; }
    [[nodiscard]] ContactFormJet form_at(const Point& x) const override;
    [[nodiscard]] Eigen::VectorXd reeb_at(const Point& x) const override;
    [[nodiscard]] Eigen::VectorXd hamiltonian_vf_of(const Jet1& f, const Point& x) const override;
    [[nodiscard]] std::shared_ptr<const ContactStructure> share() const override;

private:
    std::size_t n_;
};

/// X_f with its Jacobian on the Darboux chart, from the second-order data of f.
FieldJet darboux_hamiltonian_field_jet(std::size_t n, const Jet2& f, const Point& x);

/// X_f for an expression field on the Darboux chart.
AmbientVectorField hamiltonian_field(const ScalarField& f);

class HamiltonianSystem final : public ContactSystem
{
public:
    /// H must be a field over hamiltonian_chart(n).
    HamiltonianSystem(std::size_t n, ScalarField hamiltonian);

    static HamiltonianSystem parse(std::string_view source, std::size_t n, Parameters parameters = {});

    [[nodiscard]] std::size_t n() const noexcept { return structure_.n(); }
    [[nodiscard]] const ScalarField& hamiltonian() const noexcept { return h_; }

    [[nodiscard]] std::size_t dimension() const override { return structure_.dimension(); }
    [[nodiscard]] ContactFormJet form_at(const Point& x) const override { return structure_.form_at(x); }
    [[nodiscard]] Eigen::VectorXd reeb_at(const Point& x) const override { return structure_.reeb_at(x); }
    [[nodiscard]] Eigen::VectorXd hamiltonian_vf_of(const Jet1& f, const Point& x) const override
    {
        return structure_.hamiltonian_vf_of(f, x);
    }
    [[nodiscard]] std::shared_ptr<const ContactStructure> share() const override;

    [[nodiscard]] Jet1 hamiltonian_at(const Point& x) const override;
    [[nodiscard]] Eigen::VectorXd hamiltonian_vf_at(const Point& x) const override;
    [[nodiscard]] FieldJet hamiltonian_vf_jet_at(const Point& x) const override;

private:
    DarbouxStructure structure_;
    ScalarField h_;
};

OneFormValue eta_at(const ContactPoint& x);
TangentValue reeb_at(const ContactPoint& x);
OneFormValue flat_at(const ContactPoint& x, const TangentValue& v);
/// Closed-form inverse of flat_at.
TangentValue flat_inverse_at(const ContactPoint& x, const OneFormValue& alpha);
TangentValue hamiltonian_vf_at(const HamiltonianSystem& sys, const ContactPoint& x);
double jacobi_bracket_at(const ScalarField& f, const ScalarField& g, const ContactPoint& x);
OneFormValue lie_derivative_eta_at(const AmbientVectorField& x_field, const ContactPoint& x);
TangentValue vf_lie_bracket_at(const AmbientVectorField& x_field, const AmbientVectorField& y_field,
                               const ContactPoint& x);

/// f / h as an expression field over the common chart.
ScalarField conserved_quotient(const ScalarField& f, const ScalarField& h);

SamplePoints to_points(const std::vector<ContactPoint>& points);

} // namespace contact
