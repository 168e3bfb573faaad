#pragma once

// Type-erased pointwise objects on a flat chart of dimension N.
//
// ScalarField is the expression-backed source of second-order data. Quantities
// derived from it (Y^V(L), -eta(X), E_L, ...) only ever need first derivatives
// downstream, so they are carried as Observables (value + gradient). Vector
// fields expose value and Jacobian, which is what Lie derivatives and
// brackets consume.

#include "contact/ad.hpp"
#include "contact/expr.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace contact {

using Point = Eigen::VectorXd;
using SamplePoints = std::vector<Point>;

inline std::span<const double> as_span(const Eigen::VectorXd& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Value and first derivatives of a vector field; jacobian(k, j) = dX^k/dx^j.
struct FieldJet
{
    Eigen::VectorXd value;
    Eigen::MatrixXd jacobian;
};

class Observable
{
public:
    using Evaluator = std::function<Jet1(std::span<const double>)>;

    Observable(std::size_t dimension, Evaluator evaluator, std::string label);

    /// Implicit: every expression field is an observable.
    Observable(const ScalarField& field); // NOLINT(google-explicit-constructor)

    static Observable constant(double value, std::size_t dimension);

    [[nodiscard]] Jet1 jet_at(std::span<const double> x) const { return eval_(x); }
    [[nodiscard]] Jet1 jet_at(const Point& x) const { return eval_(as_span(x)); }
    [[nodiscard]] double value_at(const Point& x) const { return eval_(as_span(x)).value; }

    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    [[nodiscard]] Observable relabeled(std::string label) const;

private:
    std::size_t dim_;
    Evaluator eval_;
    std::string label_;
};

Observable operator+(const Observable& a, const Observable& b);
Observable operator-(const Observable& a, const Observable& b);
Observable operator*(double c, const Observable& a);
Observable operator*(const Observable& a, const Observable& b);
/// Pointwise quotient; evaluation where b vanishes raises std::domain_error.
Observable operator/(const Observable& a, const Observable& b);

class AmbientVectorField
{
public:
    using Evaluator = std::function<FieldJet(std::span<const double>)>;

    AmbientVectorField(std::size_t dimension, Evaluator evaluator, std::string label);

    /// X = sum_k components[k] d/dx^k; every component must share one chart of matching length.
    static AmbientVectorField from_components(const std::vector<ScalarField>& components, std::string label = "X");
    static AmbientVectorField zero(std::size_t dimension);
    /// The constant coordinate field d/dx^k.
    static AmbientVectorField coordinate(std::size_t dimension, std::size_t k);

    [[nodiscard]] FieldJet jet_at(std::span<const double> x) const { return eval_(x); }
    [[nodiscard]] FieldJet jet_at(const Point& x) const { return eval_(as_span(x)); }
    [[nodiscard]] Eigen::VectorXd value_at(const Point& x) const { return eval_(as_span(x)).value; }

    [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

private:
    std::size_t dim_;
    Evaluator eval_;
    std::string label_;
};

AmbientVectorField operator+(const AmbientVectorField& a, const AmbientVectorField& b);
AmbientVectorField operator*(double c, const AmbientVectorField& a);
/// f X, with Jacobian f J_X + X (grad f)^T.
AmbientVectorField operator*(const Observable& f, const AmbientVectorField& a);

/// X(f) = df(X).
double derivative_along(const Jet1& f, const Eigen::VectorXd& x_value);

} // namespace contact
