#include "contact/fields.hpp"

#include <stdexcept>

namespace contact {

namespace {

void require_same(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw std::invalid_argument("chart dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

} // namespace

Observable::Observable(std::size_t dimension, Evaluator evaluator, std::string label)
    : dim_(dimension), eval_(std::move(evaluator)), label_(std::move(label))
{
}

Observable::Observable(const ScalarField& field)
    : dim_(field.chart().size()),
      eval_([field](std::span<const double> x) { return field.jet(x).first_order(); }),
      label_(to_string(field.ast()))
{
}

Observable Observable::constant(double value, std::size_t dimension)
{
    return Observable(
        dimension,
        [value, dimension](std::span<const double>) {
            return Jet1{value, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension))};
        },
        std::to_string(value));
}

Observable Observable::relabeled(std::string label) const
{
    Observable copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

Observable operator+(const Observable& a, const Observable& b)
{
    require_same(a.dimension(), b.dimension());
    return Observable(
        a.dimension(),
        [a, b](std::span<const double> x) {
            Jet1 fa = a.jet_at(x);
            const Jet1 fb = b.jet_at(x);
            fa.value += fb.value;
            fa.gradient += fb.gradient;
            return fa;
        },
        "(" + a.label() + ") + (" + b.label() + ")");
}

Observable operator-(const Observable& a, const Observable& b)
{
    require_same(a.dimension(), b.dimension());
    return Observable(
        a.dimension(),
        [a, b](std::span<const double> x) {
            Jet1 fa = a.jet_at(x);
            const Jet1 fb = b.jet_at(x);
            fa.value -= fb.value;
            fa.gradient -= fb.gradient;
            return fa;
        },
        "(" + a.label() + ") - (" + b.label() + ")");
}

Observable operator*(double c, const Observable& a)
{
    return Observable(
        a.dimension(),
        [c, a](std::span<const double> x) {
            Jet1 fa = a.jet_at(x);
            fa.value *= c;
            fa.gradient *= c;
            return fa;
        },
        std::to_string(c) + "*(" + a.label() + ")");
}

Observable operator*(const Observable& a, const Observable& b)
{
    require_same(a.dimension(), b.dimension());
    return Observable(
        a.dimension(),
        [a, b](std::span<const double> x) {
            const Jet1 fa = a.jet_at(x);
            const Jet1 fb = b.jet_at(x);
            return Jet1{fa.value * fb.value, fa.value * fb.gradient + fb.value * fa.gradient};
        },
        "(" + a.label() + ")*(" + b.label() + ")");
}

Observable operator/(const Observable& a, const Observable& b)
{
    require_same(a.dimension(), b.dimension());
    return Observable(
        a.dimension(),
        [a, b](std::span<const double> x) {
            const Jet1 fa = a.jet_at(x);
            const Jet1 fb = b.jet_at(x);
            if (fb.value == 0.0) {
                throw std::domain_error("quotient denominator " + b.label() + " vanishes");
            }
            const double q = fa.value / fb.value;
            return Jet1{q, (fa.gradient - q * fb.gradient) / fb.value};
        },
        "(" + a.label() + ")/(" + b.label() + ")");
}

AmbientVectorField::AmbientVectorField(std::size_t dimension, Evaluator evaluator, std::string label)
    : dim_(dimension), eval_(std::move(evaluator)), label_(std::move(label))
{
}

AmbientVectorField AmbientVectorField::from_components(const std::vector<ScalarField>& components, std::string label)
{
    if (components.empty()) {
        throw std::invalid_argument("vector field needs at least one component");
    }
    const Chart& chart = components.front().chart();
    for (const auto& c : components) {
        if (c.chart() != chart) {
            throw std::invalid_argument("vector field components must share one chart");
        }
    }
    require_same(components.size(), chart.size());
    const std::size_t n = chart.size();
    return AmbientVectorField(
        n,
        [components, n](std::span<const double> x) {
            const auto dim = static_cast<Eigen::Index>(n);
            FieldJet out{Eigen::VectorXd(dim), Eigen::MatrixXd(dim, dim)};
            for (Eigen::Index k = 0; k < dim; ++k) {
                const Jet2 c = components[static_cast<std::size_t>(k)].jet(x);
                out.value(k) = c.value();
                out.jacobian.row(k) = c.gradient().transpose();
            }
            return out;
        },
        std::move(label));
}

AmbientVectorField AmbientVectorField::zero(std::size_t dimension)
{
    return AmbientVectorField(
        dimension,
        [dimension](std::span<const double>) {
            const auto dim = static_cast<Eigen::Index>(dimension);
            return FieldJet{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
        },
        "0");
}

AmbientVectorField AmbientVectorField::coordinate(std::size_t dimension, std::size_t k)
{
    if (k >= dimension) {
        throw std::invalid_argument("coordinate index out of range");
    }
    return AmbientVectorField(
        dimension,
        [dimension, k](std::span<const double>) {
            const auto dim = static_cast<Eigen::Index>(dimension);
            FieldJet out{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
            out.value(static_cast<Eigen::Index>(k)) = 1.0;
            return out;
        },
        "d/dx" + std::to_string(k));
}

AmbientVectorField operator+(const AmbientVectorField& a, const AmbientVectorField& b)
{
    require_same(a.dimension(), b.dimension());
    return AmbientVectorField(
        a.dimension(),
        [a, b](std::span<const double> x) {
            FieldJet ja = a.jet_at(x);
            const FieldJet jb = b.jet_at(x);
            ja.value += jb.value;
            ja.jacobian += jb.jacobian;
            return ja;
        },
        a.label() + " + " + b.label());
}

AmbientVectorField operator*(double c, const AmbientVectorField& a)
{
    return AmbientVectorField(
        a.dimension(),
        [c, a](std::span<const double> x) {
            FieldJet ja = a.jet_at(x);
            ja.value *= c;
            ja.jacobian *= c;
            return ja;
        },
        std::to_string(c) + "*" + a.label());
}

AmbientVectorField operator*(const Observable& f, const AmbientVectorField& a)
{
    require_same(f.dimension(), a.dimension());
    return AmbientVectorField(
        a.dimension(),
        [f, a](std::span<const double> x) {
            FieldJet ja = a.jet_at(x);
            const Jet1 jf = f.jet_at(x);
            ja.jacobian = jf.value * ja.jacobian + ja.value * jf.gradient.transpose();
            ja.value *= jf.value;
            return ja;
        },
        "(" + f.label() + ")*" + a.label());
}

double derivative_along(const Jet1& f, const Eigen::VectorXd& x_value)
{
    return f.gradient.dot(x_value);
}

} // namespace contact
