#include "contact/ad.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace contact {

namespace {

void require_same_dimension(const Jet2& a, const Jet2& b)
{
    if (a.dimension() != b.dimension()) {
        throw std::invalid_argument("jet dimension mismatch: " + std::to_string(a.dimension()) + " vs "
                                    + std::to_string(b.dimension()));
    }
}

// x^k by repeated squaring, k >= 0.
double integer_power(double x, int k)
{
    double result = 1.0;
    double base = x;
    auto e = static_cast<unsigned>(k);
    while (e != 0U) {
        if ((e & 1U) != 0U) {
            result *= base;
        }
        base *= base;
        e >>= 1U;
    }
    return result;
}

bool is_constant(const Jet2& a)
{
    return a.gradient().isZero(0.0) && a.hessian().isZero(0.0);
}

} // namespace

Jet2 Jet2::constant(double value, Eigen::Index m)
{
    return Jet2(value, Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, m));
}

Jet2 Jet2::variable(double value, Eigen::Index k, Eigen::Index m)
{
    if (k < 0 || k >= m) {
        throw std::invalid_argument("variable index out of range");
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    g(k) = 1.0;
    return Jet2(value, std::move(g), Eigen::MatrixXd::Zero(m, m));
}

Jet2::Jet2(double value, Eigen::VectorXd gradient, Eigen::MatrixXd hessian)
    : value_(value), gradient_(std::move(gradient)), hessian_(std::move(hessian))
{
    if (hessian_.rows() != gradient_.size() || hessian_.cols() != gradient_.size()) {
        throw std::invalid_argument("hessian shape does not match gradient length");
    }
    mirror_lower();
}

void Jet2::mirror_lower()
{
    hessian_.triangularView<Eigen::StrictlyUpper>() = hessian_.transpose();
}

Jet2& Jet2::operator+=(const Jet2& other)
{
    require_same_dimension(*this, other);
    value_ += other.value_;
    gradient_ += other.gradient_;
    hessian_ += other.hessian_;
    return *this;
}

Jet2& Jet2::operator-=(const Jet2& other)
{
    require_same_dimension(*this, other);
    value_ -= other.value_;
    gradient_ -= other.gradient_;
    hessian_ -= other.hessian_;
    return *this;
}

Jet2& Jet2::operator*=(const Jet2& other)
{
    require_same_dimension(*this, other);
    const Eigen::MatrixXd cross = gradient_ * other.gradient_.transpose();
    hessian_ = value_ * other.hessian_ + other.value_ * hessian_ + cross + cross.transpose();
    gradient_ = value_ * other.gradient_ + other.value_ * gradient_;
    value_ *= other.value_;
    mirror_lower();
    return *this;
}

Jet2& Jet2::operator/=(const Jet2& other)
{
    require_same_dimension(*this, other);
    const double b = other.value_;
    if (b == 0.0) {
        throw std::domain_error("division by zero");
    }
    *this *= chain(other, 1.0 / b, -1.0 / (b * b), 2.0 / (b * b * b));
    return *this;
}

Jet2 chain(const Jet2& a, double f, double df, double d2f)
{
    Jet2 out;
    out.value_ = f;
    out.gradient_ = df * a.gradient_;
    out.hessian_ = df * a.hessian_ + d2f * (a.gradient_ * a.gradient_.transpose());
    out.mirror_lower();
    return out;
}

Jet2 operator+(const Jet2& a, const Jet2& b)
{
    Jet2 r = a;
    r += b;
    return r;
}

Jet2 operator-(const Jet2& a, const Jet2& b)
{
    Jet2 r = a;
    r -= b;
    return r;
}

Jet2 operator*(const Jet2& a, const Jet2& b)
{
    Jet2 r = a;
    r *= b;
    return r;
}

Jet2 operator/(const Jet2& a, const Jet2& b)
{
    Jet2 r = a;
    r /= b;
    return r;
}

Jet2 operator-(const Jet2& a)
{
    return Jet2(-a.value(), -a.gradient(), -a.hessian());
}

Jet2 operator+(const Jet2& a, double b)
{
    return Jet2(a.value() + b, a.gradient(), a.hessian());
}

Jet2 operator*(double a, const Jet2& b)
{
    return Jet2(a * b.value(), a * b.gradient(), a * b.hessian());
}

Jet2 sin(const Jet2& a)
{
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    return chain(a, s, c, -s);
}

Jet2 cos(const Jet2& a)
{
    const double s = std::sin(a.value());
    const double c = std::cos(a.value());
    return chain(a, c, -s, -c);
}

Jet2 exp(const Jet2& a)
{
    const double e = std::exp(a.value());
    return chain(a, e, e, e);
}

Jet2 log(const Jet2& a)
{
    const double x = a.value();
    if (!(x > 0.0)) {
        throw std::domain_error("log of non-positive value " + std::to_string(x));
    }
    return chain(a, std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet2 sqrt(const Jet2& a)
{
    const double x = a.value();
    if (!(x > 0.0)) {
        throw std::domain_error("sqrt needs a positive argument, got " + std::to_string(x));
    }
    const double r = std::sqrt(x);
    return chain(a, r, 0.5 / r, -0.25 / (r * x));
}

Jet2 pow(const Jet2& a, int exponent)
{
    const double x = a.value();
    const int k = exponent;
    if (k == 0) {
        return Jet2::constant(1.0, a.dimension());
    }
    if (k < 0) {
        if (x == 0.0) {
            throw std::domain_error("zero raised to a negative power");
        }
        return Jet2::constant(1.0, a.dimension()) / pow(a, -k);
    }
    const double f = integer_power(x, k);
    const double df = k * integer_power(x, k - 1);
    const double d2f = k >= 2 ? k * (k - 1) * integer_power(x, k - 2) : 0.0;
    return chain(a, f, df, d2f);
}

Jet2 pow(const Jet2& a, const Jet2& b)
{
    require_same_dimension(a, b);
    constexpr double max_integer_exponent = 1 << 20;
    const double e = b.value();
    if (is_constant(b) && std::trunc(e) == e && std::abs(e) <= max_integer_exponent) {
        return pow(a, static_cast<int>(e));
    }
    if (!(a.value() > 0.0)) {
        throw std::domain_error("non-integer power of non-positive base " + std::to_string(a.value()));
    }
    return exp(b * log(a));
}

Jet2 jet2_binary(BinaryOp op, const Jet2& a, const Jet2& b)
{
    switch (op) {
    case BinaryOp::add: return a + b;
    case BinaryOp::sub: return a - b;
    case BinaryOp::mul: return a * b;
    case BinaryOp::div: return a / b;
    case BinaryOp::pow: return pow(a, b);
    }
    throw std::invalid_argument("unknown binary op");
}

Jet2 jet2_unary(UnaryOp op, const Jet2& a)
{
    switch (op) {
    case UnaryOp::neg: return -a;
    case UnaryOp::sin: return sin(a);
    case UnaryOp::cos: return cos(a);
    case UnaryOp::exp: return exp(a);
    case UnaryOp::log: return log(a);
    case UnaryOp::sqrt: return sqrt(a);
    }
    throw std::invalid_argument("unknown unary op");
}

std::vector<Jet2> seed_variables(std::span<const double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("seed_variables needs at least one value");
    }
    const auto m = static_cast<Eigen::Index>(values.size());
    std::vector<Jet2> jets;
    jets.reserve(values.size());
    for (Eigen::Index k = 0; k < m; ++k) {
        jets.push_back(Jet2::variable(values[static_cast<std::size_t>(k)], k, m));
    }
    return jets;
}

} // namespace contact
