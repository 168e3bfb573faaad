#include "contact/contact_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contact {

namespace {

void require_points(const SamplePoints& points)
{
    if (points.empty()) {
        throw std::invalid_argument("check needs a nonempty sample of points");
    }
}

std::size_t half_dimension(Eigen::Index dim)
{
    if (dim < 3 || dim % 2 == 0) {
        throw std::invalid_argument("Darboux chart dimension must be 2n+1 with n >= 1, got " + std::to_string(dim));
    }
    return static_cast<std::size_t>((dim - 1) / 2);
}

} // namespace

// ---------------------------------------------------------------------------
// Generic layer
// ---------------------------------------------------------------------------

Eigen::MatrixXd exterior_derivative(const ContactFormJet& form)
{
    // d(eta_k dx^k) = d_j eta_k dx^j ^ dx^k, so D(j, k) = d_j eta_k - d_k eta_j.
    const Eigen::MatrixXd djk = form.jacobian.transpose();
    return djk - djk.transpose();
}

Eigen::VectorXd interior_d_eta(const ContactFormJet& form, const Eigen::VectorXd& v)
{
    return exterior_derivative(form).transpose() * v;
}

Eigen::MatrixXd flat_matrix(const ContactFormJet& form)
{
    return exterior_derivative(form).transpose() + form.eta * form.eta.transpose();
}

Eigen::VectorXd flat(const ContactFormJet& form, const Eigen::VectorXd& v)
{
    return interior_d_eta(form, v) + form.eta.dot(v) * form.eta;
}

Eigen::VectorXd flat_inverse(const ContactFormJet& form, const Eigen::VectorXd& alpha)
{
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(flat_matrix(form));
    if (!std::isfinite(lu.determinant()) || lu.determinant() == 0.0) {
        throw std::domain_error("contact form is degenerate at this point");
    }
    return lu.solve(alpha);
}

Eigen::VectorXd lie_derivative(const ContactFormJet& form, const FieldJet& x)
{
    // (L_X eta)_j = X^k d_k eta_j + eta_k d_j X^k
    return form.jacobian * x.value + x.jacobian.transpose() * form.eta;
}

Eigen::VectorXd lie_bracket(const FieldJet& x, const FieldJet& y)
{
    return y.jacobian * x.value - x.jacobian * y.value;
}

Eigen::VectorXd ContactStructure::hamiltonian_vf_of(const Jet1& f, const Point& x) const
{
    const ContactFormJet form = form_at(x);
    const double reeb_f = f.gradient.dot(reeb_at(x));
    return flat_inverse(form, f.gradient - (reeb_f + f.value) * form.eta);
}

std::shared_ptr<const ContactSystem> ContactSystem::share_system() const
{
    return std::static_pointer_cast<const ContactSystem>(share());
}

double jacobi_bracket(const ContactStructure& s, const Jet1& f, const Jet1& g, const Point& x)
{
    const Eigen::VectorXd xf = s.hamiltonian_vf_of(f, x);
    return g.gradient.dot(xf) + g.value * f.gradient.dot(s.reeb_at(x));
}

Observable bracket_observable(const ContactStructure& s, const Observable& f, const Observable& g, double step)
{
    auto shared = s.share();
    auto value = [shared, f, g](const Point& x) { return jacobi_bracket(*shared, f.jet_at(x), g.jet_at(x), x); };
    return Observable(
        s.dimension(),
        [value, step](std::span<const double> xs) {
            Point x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
            Jet1 out{value(x), Eigen::VectorXd(x.size())};
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                Point plus = x;
                Point minus = x;
                plus(j) += step;
                minus(j) -= step;
                out.gradient(j) = (value(plus) - value(minus)) / (2.0 * step);
            }
            return out;
        },
        "{" + f.label() + ", " + g.label() + "}");
}

Observable minus_eta_of(const ContactStructure& s, const AmbientVectorField& x)
{
    auto shared = s.share();
    return Observable(
        s.dimension(),
        [shared, x](std::span<const double> xs) {
            const Point pt = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
            const ContactFormJet form = shared->form_at(pt);
            const FieldJet xj = x.jet_at(xs);
            return Jet1{-form.eta.dot(xj.value),
                        -(form.jacobian.transpose() * xj.value + xj.jacobian.transpose() * form.eta)};
        },
        "-eta(" + x.label() + ")");
}

double dissipation_residual(const ContactSystem& sys, const Observable& f, const SamplePoints& points)
{
    require_points(points);
    double worst = 0.0;
    for (const Point& x : points) {
        const Jet1 h = sys.hamiltonian_at(x);
        const Jet1 fx = f.jet_at(x);
        const double reeb_h = h.gradient.dot(sys.reeb_at(x));
        const double r = fx.gradient.dot(sys.hamiltonian_vf_at(x)) + reeb_h * fx.value;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

ConformalCheck check_conformal_contactomorphism(const ContactStructure& s, const AmbientVectorField& x,
                                                const SamplePoints& points, double tolerance)
{
    require_points(points);
    ConformalCheck out;
    for (const Point& pt : points) {
        const ContactFormJet form = s.form_at(pt);
        const Eigen::VectorXd lie = lie_derivative(form, x.jet_at(pt));
        const double a = lie.dot(s.reeb_at(pt));
        out.a_values.push_back(a);
        out.residual = std::max(out.residual, (lie - a * form.eta).lpNorm<Eigen::Infinity>());
    }
    out.is_conformal = out.residual <= tolerance;
    return out;
}

DynamicalSymmetryCheck check_dynamical_symmetry(const ContactSystem& sys, const AmbientVectorField& x,
                                                const SamplePoints& points)
{
    require_points(points);
    double worst = 0.0;
    for (const Point& pt : points) {
        const Eigen::VectorXd bracket = lie_bracket(sys.hamiltonian_vf_jet_at(pt), x.jet_at(pt));
        worst = std::max(worst, std::abs(sys.form_at(pt).eta.dot(bracket)));
    }
    return {worst, minus_eta_of(sys, x)};
}

CartanSymmetryCheck check_cartan_symmetry(const ContactSystem& sys, const AmbientVectorField& x, const Observable& a,
                                          const Observable& g, const SamplePoints& points)
{
    require_points(points);
    CartanSymmetryCheck out{0.0, 0.0, (-1.0 * minus_eta_of(sys, x)) - g};
    for (const Point& pt : points) {
        const ContactFormJet form = sys.form_at(pt);
        const FieldJet xj = x.jet_at(pt);
        const Jet1 aj = a.jet_at(pt);
        const Jet1 gj = g.jet_at(pt);
        const Jet1 h = sys.hamiltonian_at(pt);
        const double reeb_h = h.gradient.dot(sys.reeb_at(pt));

        const Eigen::VectorXd form_defect = lie_derivative(form, xj) - aj.value * form.eta - gj.gradient;
        const double energy_defect = h.gradient.dot(xj.value) - aj.value * h.value - gj.value * reeb_h;
        out.residual_form = std::max(out.residual_form, form_defect.lpNorm<Eigen::Infinity>());
        out.residual_energy = std::max(out.residual_energy, std::abs(energy_defect));
    }
    out.f = out.f.relabeled("eta(" + x.label() + ") - (" + g.label() + ")");
    return out;
}

// ---------------------------------------------------------------------------
// Darboux chart
// ---------------------------------------------------------------------------

Point ContactPoint::to_vector() const
{
    if (q.size() != p.size() || q.size() < 1) {
        throw std::invalid_argument("contact point needs |q| = |p| >= 1");
    }
    const Eigen::Index n = q.size();
    Point x(2 * n + 1);
    x << q, p, z;
    return x;
}

ContactPoint ContactPoint::from_vector(const Point& x)
{
    const auto n = static_cast<Eigen::Index>(half_dimension(x.size()));
    return {x.head(n), x.segment(n, n), x(2 * n)};
}

Eigen::VectorXd TangentValue::to_vector() const
{
    const Eigen::Index n = dq.size();
    if (dp.size() != n) {
        throw std::invalid_argument("tangent components have mismatched lengths");
    }
    Eigen::VectorXd v(2 * n + 1);
    v << dq, dp, dz;
    return v;
}

TangentValue TangentValue::from_vector(const Eigen::VectorXd& v)
{
    const auto n = static_cast<Eigen::Index>(half_dimension(v.size()));
    return {v.head(n), v.segment(n, n), v(2 * n)};
}

Eigen::VectorXd OneFormValue::to_vector() const
{
    const Eigen::Index n = cq.size();
    if (cp.size() != n) {
        throw std::invalid_argument("covector components have mismatched lengths");
    }
    Eigen::VectorXd v(2 * n + 1);
    v << cq, cp, cz;
    return v;
}

OneFormValue OneFormValue::from_vector(const Eigen::VectorXd& v)
{
    const auto n = static_cast<Eigen::Index>(half_dimension(v.size()));
    return {v.head(n), v.segment(n, n), v(2 * n)};
}

DarbouxStructure::DarbouxStructure(std::size_t n) : n_(n)
{
    if (n == 0) {
        throw std::invalid_argument("Darboux chart needs n >= 1");
    }
}

ContactFormJet DarbouxStructure::form_at(const Point& x) const
{
    const auto n = static_cast<Eigen::Index>(n_);
    const Eigen::Index dim = 2 * n + 1;
    ContactFormJet form{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
    form.eta.head(n) = -x.segment(n, n);
    form.eta(2 * n) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        form.jacobian(i, n + i) = -1.0;
    }
    return form;
}

Eigen::VectorXd DarbouxStructure::reeb_at(const Point& /*x*/) const
{
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
    r(r.size() - 1) = 1.0;
    return r;
}

Eigen::VectorXd DarbouxStructure::hamiltonian_vf_of(const Jet1& f, const Point& x) const
{
    const auto n = static_cast<Eigen::Index>(n_);
    const auto p = x.segment(n, n);
    const auto fq = f.gradient.head(n);
    const auto fp = f.gradient.segment(n, n);
    const double fz = f.gradient(2 * n);
    Eigen::VectorXd v(2 * n + 1);
    v.head(n) = fp;
    v.segment(n, n) = -(fq + fz * p);
    v(2 * n) = p.dot(fp) - f.value;
    return v;
}

std::shared_ptr<const ContactStructure> DarbouxStructure::share() const
{
    return std::make_shared<DarbouxStructure>(*this);
}

FieldJet darboux_hamiltonian_field_jet(std::size_t n_, const Jet2& f, const Point& x)
{
    const auto n = static_cast<Eigen::Index>(n_);
    const Eigen::Index dim = 2 * n + 1;
    const Eigen::VectorXd& g = f.gradient();
    const Eigen::MatrixXd& hs = f.hessian();
    const auto p = x.segment(n, n);

    FieldJet out{DarbouxStructure(n_).hamiltonian_vf_of(f.first_order(), x), Eigen::MatrixXd::Zero(dim, dim)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.jacobian.row(i) = hs.row(n + i);
        out.jacobian.row(n + i) = -(hs.row(i) + p(i) * hs.row(2 * n));
        out.jacobian(n + i, n + i) -= g(2 * n);
        out.jacobian.row(2 * n) += p(i) * hs.row(n + i);
        out.jacobian(2 * n, n + i) += g(n + i);
    }
    out.jacobian.row(2 * n) -= g.transpose();
    return out;
}

AmbientVectorField hamiltonian_field(const ScalarField& f)
{
    const std::size_t n = half_dimension(static_cast<Eigen::Index>(f.chart().size()));
    return AmbientVectorField(
        2 * n + 1,
        [f, n](std::span<const double> xs) {
            const Point x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
            return darboux_hamiltonian_field_jet(n, f.jet(xs), x);
        },
        "X[" + to_string(f.ast()) + "]");
}

HamiltonianSystem::HamiltonianSystem(std::size_t n, ScalarField hamiltonian)
    : structure_(n), h_(std::move(hamiltonian))
{
    if (h_.chart() != hamiltonian_chart(n)) {
        throw std::invalid_argument("Hamiltonian must be defined over the chart (q1..qn, p1..pn, z)");
    }
}

HamiltonianSystem HamiltonianSystem::parse(std::string_view source, std::size_t n, Parameters parameters)
{
    return HamiltonianSystem(n, ScalarField::parse(source, hamiltonian_chart(n), std::move(parameters)));
}

std::shared_ptr<const ContactStructure> HamiltonianSystem::share() const
{
    return std::make_shared<HamiltonianSystem>(*this);
}

Jet1 HamiltonianSystem::hamiltonian_at(const Point& x) const
{
    return h_.jet(as_span(x)).first_order();
}

Eigen::VectorXd HamiltonianSystem::hamiltonian_vf_at(const Point& x) const
{
    return structure_.hamiltonian_vf_of(hamiltonian_at(x), x);
}

FieldJet HamiltonianSystem::hamiltonian_vf_jet_at(const Point& x) const
{
    return darboux_hamiltonian_field_jet(n(), h_.jet(as_span(x)), x);
}

OneFormValue eta_at(const ContactPoint& x)
{
    const Eigen::Index n = x.p.size();
    return {-x.p, Eigen::VectorXd::Zero(n), 1.0};
}

TangentValue reeb_at(const ContactPoint& x)
{
    const Eigen::Index n = x.q.size();
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 1.0};
}

OneFormValue flat_at(const ContactPoint& x, const TangentValue& v)
{
    const double eta_v = v.dz - x.p.dot(v.dq);
    return {-v.dp - eta_v * x.p, v.dq, eta_v};
}

TangentValue flat_inverse_at(const ContactPoint& x, const OneFormValue& alpha)
{
    const double eta_v = alpha.cz;
    return {alpha.cp, -alpha.cq - eta_v * x.p, eta_v + x.p.dot(alpha.cp)};
}

TangentValue hamiltonian_vf_at(const HamiltonianSystem& sys, const ContactPoint& x)
{
    return TangentValue::from_vector(sys.hamiltonian_vf_at(x.to_vector()));
}

double jacobi_bracket_at(const ScalarField& f, const ScalarField& g, const ContactPoint& x)
{
    const Point pt = x.to_vector();
    return jacobi_bracket(DarbouxStructure(x.n()), f.jet(as_span(pt)).first_order(),
                          g.jet(as_span(pt)).first_order(), pt);
}

OneFormValue lie_derivative_eta_at(const AmbientVectorField& x_field, const ContactPoint& x)
{
    const Point pt = x.to_vector();
    return OneFormValue::from_vector(lie_derivative(DarbouxStructure(x.n()).form_at(pt), x_field.jet_at(pt)));
}

TangentValue vf_lie_bracket_at(const AmbientVectorField& x_field, const AmbientVectorField& y_field,
                               const ContactPoint& x)
{
    const Point pt = x.to_vector();
    return TangentValue::from_vector(lie_bracket(x_field.jet_at(pt), y_field.jet_at(pt)));
}

ScalarField conserved_quotient(const ScalarField& f, const ScalarField& h)
{
    if (f.chart() != h.chart()) {
        throw std::invalid_argument("quotient operands must share a chart");
    }
    Parameters merged = f.parameters();
    for (const auto& [name, value] : h.parameters()) {
        const auto [it, inserted] = merged.emplace(name, value);
        if (!inserted && it->second != value) {
            throw std::invalid_argument("parameter '" + name + "' bound to different values");
        }
    }
    return ScalarField(Ast::binary(BinaryOp::div, f.ast(), h.ast()), f.chart(), std::move(merged));
}

SamplePoints to_points(const std::vector<ContactPoint>& points)
{
    SamplePoints out;
    out.reserve(points.size());
    for (const auto& p : points) {
        out.push_back(p.to_vector());
    }
    return out;
}

} // namespace contact
