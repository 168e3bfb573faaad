#include "contact/lifts.hpp"

#include <algorithm>

namespace contact {

namespace {

// Builds a component over `chart`, rejecting dependencies outside it with a
// TangencyError (for other chart-like names) rather than a bare unbound error.
ScalarField component(const std::string& source, const Chart& chart, const Parameters& parameters,
                      const std::string& role)
{
    const Ast ast = parse(source);
    for (const auto& name : free_variables(ast)) {
        if (parameters.contains(name) || std::find(chart.begin(), chart.end(), name) != chart.end()) {
            continue;
        }
        throw TangencyError(role + " may not depend on '" + name + "'");
    }
    return ScalarField(ast, chart, parameters);
}

void require_chart(const ScalarField& f, const Chart& chart, const std::string& role)
{
    if (f.chart() != chart) {
        throw std::invalid_argument(role + " has the wrong chart");
    }
}

std::vector<Jet2> jets_on_tqr(const std::vector<ScalarField>& fields, std::span<const double> x)
{
    std::vector<Jet2> out;
    out.reserve(fields.size());
    for (const auto& f : fields) {
        out.push_back(f.jet(x));
    }
    return out;
}

struct LiftedComponents
{
    std::vector<ScalarField> y; // over lagrangian_chart(n)
    ScalarField z;
};

LiftedComponents on_tqr(const VectorFieldQR& field)
{
    const Chart chart = lagrangian_chart(field.n());
    LiftedComponents out{{}, field.z_component().rebased(chart)};
    for (const auto& c : field.q_components()) {
        out.y.push_back(c.rebased(chart));
    }
    return out;
}

FieldJet complete_lift_jet(const LiftedComponents& c, std::span<const double> xs)
{
    const auto n = static_cast<Eigen::Index>(c.y.size());
    const Eigen::Index dim = 2 * n + 1;
    const Eigen::Map<const Eigen::VectorXd> x(xs.data(), dim);
    const auto v = x.segment(n, n);
    FieldJet out{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
    const std::vector<Jet2> ys = jets_on_tqr(c.y, xs);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Jet2& yi = ys[static_cast<std::size_t>(i)];
        out.value(i) = yi.value();
        out.jacobian.row(i) = yi.gradient().transpose();
        out.value(n + i) = yi.gradient().head(n).dot(v);
        out.jacobian.row(n + i) = (yi.hessian().topRows(n).transpose() * v).transpose();
        out.jacobian.block(n + i, n, 1, n) += yi.gradient().head(n).transpose();
    }
    const Jet2 z = c.z.jet(xs);
    out.value(2 * n) = z.value();
    out.jacobian.row(2 * n) = z.gradient().transpose();
    return out;
}

FieldJet vertical_lift_jet(const LiftedComponents& c, std::span<const double> xs)
{
    const auto n = static_cast<Eigen::Index>(c.y.size());
    const Eigen::Index dim = 2 * n + 1;
    FieldJet out{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
    const std::vector<Jet2> ys = jets_on_tqr(c.y, xs);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.value(n + i) = ys[static_cast<std::size_t>(i)].value();
        out.jacobian.row(n + i) = ys[static_cast<std::size_t>(i)].gradient().transpose();
    }
    return out;
}

} // namespace

VectorFieldQ::VectorFieldQ(std::size_t n, std::vector<ScalarField> components) : components_(std::move(components))
{
    if (n == 0 || components_.size() != n) {
        throw std::invalid_argument("field on Q needs exactly n >= 1 components");
    }
    const Chart chart = configuration_chart(n);
    for (const auto& c : components_) {
        require_chart(c, chart, "component of a field on Q");
    }
}

VectorFieldQ VectorFieldQ::parse(const std::vector<std::string>& components, const Parameters& parameters)
{
    const Chart chart = configuration_chart(components.size());
    std::vector<ScalarField> fields;
    for (std::size_t i = 0; i < components.size(); ++i) {
        fields.push_back(component(components[i], chart, parameters, "component " + std::to_string(i + 1)
                                                                          + " of a field on Q"));
    }
    return VectorFieldQ(components.size(), std::move(fields));
}

VectorFieldQ VectorFieldQ::zero(std::size_t n)
{
    return VectorFieldQ(n, std::vector<ScalarField>(n, ScalarField::constant(0.0, configuration_chart(n))));
}

VectorFieldQR::VectorFieldQR(std::size_t n, std::vector<ScalarField> q_components, ScalarField z_component)
    : q_components_(std::move(q_components)), z_component_(std::move(z_component))
{
    if (n == 0 || q_components_.size() != n) {
        throw std::invalid_argument("field on Q x R needs exactly n >= 1 position components");
    }
    const Chart chart = extended_configuration_chart(n);
    for (const auto& c : q_components_) {
        require_chart(c, chart, "position component of a field on Q x R");
    }
    const Chart z_chart{"z"};
    if (z_component_.chart() != z_chart) {
        throw TangencyError("z component of a field on Q x R must depend on z only");
    }
}

VectorFieldQR::VectorFieldQR(const VectorFieldQ& y)
    : z_component_(ScalarField::constant(0.0, Chart{"z"}))
{
    const Chart chart = extended_configuration_chart(y.n());
    for (const auto& c : y.components()) {
        q_components_.push_back(c.rebased(chart));
    }
}

VectorFieldQR VectorFieldQR::parse(const std::vector<std::string>& q_components, const std::string& z_component,
                                   const Parameters& parameters)
{
    const std::size_t n = q_components.size();
    const Chart chart = extended_configuration_chart(n);
    std::vector<ScalarField> fields;
    for (std::size_t i = 0; i < n; ++i) {
        fields.push_back(component(q_components[i], chart, parameters,
                                   "position component " + std::to_string(i + 1) + " of a field on Q x R"));
    }
    return VectorFieldQR(n, std::move(fields), component(z_component, Chart{"z"}, parameters, "z component"));
}

TQRTangent vertical_lift_Q(const VectorFieldQ& y, const TQRPoint& x)
{
    return vertical_lift_QR(VectorFieldQR(y), x);
}

TQRTangent complete_lift_Q(const VectorFieldQ& y, const TQRPoint& x)
{
    return complete_lift_QR(VectorFieldQR(y), x);
}

TQRTangent complete_lift_QR(const VectorFieldQR& y, const TQRPoint& x)
{
    const Point pt = x.to_vector();
    return TQRTangent::from_vector(complete_lift_jet(on_tqr(y), as_span(pt)).value);
}

TQRTangent vertical_lift_QR(const VectorFieldQR& y, const TQRPoint& x)
{
    const Point pt = x.to_vector();
    return TQRTangent::from_vector(vertical_lift_jet(on_tqr(y), as_span(pt)).value);
}

AmbientVectorField complete_lift_field(const VectorFieldQR& y)
{
    LiftedComponents c = on_tqr(y);
    return AmbientVectorField(
        2 * y.n() + 1, [c](std::span<const double> x) { return complete_lift_jet(c, x); }, "Y^C");
}

AmbientVectorField vertical_lift_field(const VectorFieldQR& y)
{
    LiftedComponents c = on_tqr(y);
    return AmbientVectorField(
        2 * y.n() + 1, [c](std::span<const double> x) { return vertical_lift_jet(c, x); }, "Y^V");
}

AmbientVectorField complete_lift_field(const VectorFieldQ& y)
{
    return complete_lift_field(VectorFieldQR(y));
}

AmbientVectorField vertical_lift_field(const VectorFieldQ& y)
{
    return vertical_lift_field(VectorFieldQR(y));
}

Observable apply_field(const AmbientVectorField& x, const ScalarField& f)
{
    if (x.dimension() != f.chart().size()) {
        throw std::invalid_argument("field and function live on different charts");
    }
    return Observable(
        x.dimension(),
        [x, f](std::span<const double> xs) {
            const FieldJet xj = x.jet_at(xs);
            const Jet2 fj = f.jet(xs);
            return Jet1{fj.gradient().dot(xj.value), xj.jacobian.transpose() * fj.gradient() + fj.hessian() * xj.value};
        },
        x.label() + "(" + to_string(f.ast()) + ")");
}

Observable z_component_observable(const VectorFieldQR& y)
{
    return Observable(y.z_component().rebased(lagrangian_chart(y.n()))).relabeled(to_string(y.z_component().ast()));
}

} // namespace contact
