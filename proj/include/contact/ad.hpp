#pragma once

/**
 * @file ad.hpp
 * @brief Second-order forward-mode automatic differentiation.
 *
 * A Jet2 carries the value, gradient and Hessian of a scalar quantity with
 * respect to a fixed set of m active variables. Every operation propagates
 * the exact second-order Taylor data, so the Hessian of a composite
 * expression is available at the cost of a single forward pass.
 *
 * @code
 * auto vars = contact::seed_variables(std::vector<double>{1.0, 2.0});
 * auto f = vars[0] * vars[1];
 * // f.value() == 2, f.gradient() == (2, 1), f.hessian() == [[0,1],[1,0]]
 * @endcode
 */

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace contact {

/// Value and gradient of a scalar quantity.
struct Jet1
{
    double value = 0.0;
    Eigen::VectorXd gradient;
};

class Jet2
{
public:
    Jet2() = default;

    /// A constant over m active variables (zero gradient and Hessian).
    static Jet2 constant(double value, Eigen::Index m);

    /// The k-th of m active variables.
    static Jet2 variable(double value, Eigen::Index k, Eigen::Index m);

    /// Assembles a jet from raw parts; the Hessian is symmetrized from its lower triangle.
    Jet2(double value, Eigen::VectorXd gradient, Eigen::MatrixXd hessian);

    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] const Eigen::VectorXd& gradient() const noexcept { return gradient_; }
    [[nodiscard]] const Eigen::MatrixXd& hessian() const noexcept { return hessian_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return gradient_.size(); }

    [[nodiscard]] Jet1 first_order() const { return {value_, gradient_}; }

    Jet2& operator+=(const Jet2& other);
    Jet2& operator-=(const Jet2& other);
    Jet2& operator*=(const Jet2& other);
    Jet2& operator/=(const Jet2& other);

private:
    // Applies f(a) given f, f' and f'' evaluated at a.value().
    friend Jet2 chain(const Jet2& a, double f, double df, double d2f);

    void mirror_lower();

    double value_ = 0.0;
    Eigen::VectorXd gradient_;
    Eigen::MatrixXd hessian_;
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);

Jet2 operator+(const Jet2& a, double b);
Jet2 operator*(double a, const Jet2& b);

Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);
Jet2 sqrt(const Jet2& a);

/// a raised to a constant integer power; exact for negative bases.
Jet2 pow(const Jet2& a, int exponent);

/// General power. Integer-valued constant exponents route to the integer
/// overload; anything else is exp(b log a) and needs a.value() > 0.
Jet2 pow(const Jet2& a, const Jet2& b);

enum class BinaryOp { add, sub, mul, div, pow };
enum class UnaryOp { neg, sin, cos, exp, log, sqrt };

Jet2 jet2_binary(BinaryOp op, const Jet2& a, const Jet2& b);
Jet2 jet2_unary(UnaryOp op, const Jet2& a);

/// One active jet per entry of values: value values[k], gradient e_k, zero Hessian.
std::vector<Jet2> seed_variables(std::span<const double> values);

} // namespace contact
