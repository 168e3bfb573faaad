#pragma once

// Seeded generators and finite-difference oracles shared by the test suites.

#include "contact/expr.hpp"
#include "contact/fields.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testing {

class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

    Eigen::VectorXd vector(Eigen::Index n, double half_width = 1.0)
    {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v(i) = uniform(-half_width, half_width);
        }
        return v;
    }

    template <class T>
    const T& pick(const std::vector<T>& items)
    {
        return items[static_cast<std::size_t>(integer(0, static_cast<int>(items.size()) - 1))];
    }

private:
    std::mt19937_64 engine_;
};

inline std::string number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

/// Sum of `terms` random monomials of total degree <= max_degree in the chart variables.
inline std::string random_polynomial(Rng& rng, const contact::Chart& vars, int max_degree, int terms)
{
    std::string out = number(rng.uniform(-1.0, 1.0));
    for (int t = 0; t < terms; ++t) {
        const double c = rng.uniform(-1.0, 1.0);
        std::string term = number(std::abs(c));
        const int degree = rng.integer(1, max_degree);
        for (int d = 0; d < degree; ++d) {
            term += "*" + rng.pick(vars);
        }
        out += (c < 0 ? " - " : " + ") + term;
    }
    return out;
}

/// Random expression source over `vars` whose value and derivatives stay finite
/// and moderate on [-2, 2]^m: every partial function is guarded.
inline std::string random_safe_expression(Rng& rng, const contact::Chart& vars, int depth)
{
    if (depth <= 0 || rng.coin(0.2)) {
        return rng.coin(0.7) ? rng.pick(vars) : number(rng.uniform(0.0, 2.0));
    }
    const std::string a = random_safe_expression(rng, vars, depth - 1);
    switch (rng.integer(0, 10)) {
    case 0:
        return "(" + a + " + " + random_safe_expression(rng, vars, depth - 1) + ")";
    case 1:
        return "(" + a + " - " + random_safe_expression(rng, vars, depth - 1) + ")";
    case 2:
        return "(" + a + ")*(" + random_safe_expression(rng, vars, depth - 1) + ")";
    case 3:
        return "(" + a + ")/(2 + sin(" + random_safe_expression(rng, vars, depth - 1) + "))";
    case 4:
        return "sin(" + a + ")";
    case 5:
        return "cos(" + a + ")";
    case 6:
        return "exp(sin(" + a + "))";
    case 7:
        return "log(1 + (" + a + ")^2)";
    case 8:
        return "sqrt(2 + cos(" + a + "))";
    case 9:
        return "(sin(" + a + "))^" + std::to_string(rng.integer(2, 3));
    default:
        return "-(" + a + ")";
    }
}

/// Random expression tree (through the Ast factories) for print/parse round trips.
inline contact::Ast random_tree(Rng& rng, const contact::Chart& vars, int depth)
{
    using contact::Ast;
    if (depth <= 0 || rng.coin(0.15)) {
        if (rng.coin(0.5)) {
            return Ast::variable(rng.pick(vars));
        }
        const std::vector<double> literals{0.0, 1.0, 2.0, 0.5, 3.25, 1e-3, 12.0, 1.5e10};
        return Ast::literal(rng.pick(literals));
    }
    switch (rng.integer(0, 7)) {
    case 0:
        return Ast::negate(random_tree(rng, vars, depth - 1));
    case 1:
        return Ast::call(rng.pick(std::vector<contact::UnaryOp>{contact::UnaryOp::sin, contact::UnaryOp::cos,
                                                                contact::UnaryOp::exp, contact::UnaryOp::log,
                                                                contact::UnaryOp::sqrt}),
                         random_tree(rng, vars, depth - 1));
    default: {
        const auto op = rng.pick(std::vector<contact::BinaryOp>{contact::BinaryOp::add, contact::BinaryOp::sub,
                                                                contact::BinaryOp::mul, contact::BinaryOp::div,
                                                                contact::BinaryOp::pow});
        return Ast::binary(op, random_tree(rng, vars, depth - 1), random_tree(rng, vars, depth - 1));
    }
    }
}

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const ScalarFunction& f, const Eigen::VectorXd& x, double h = 1e-5)
{
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd a = x;
        Eigen::VectorXd b = x;
        a(i) += h;
        b(i) -= h;
        g(i) = (f(a) - f(b)) / (2.0 * h);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const ScalarFunction& f, const Eigen::VectorXd& x, double h = 1e-4)
{
    const Eigen::Index m = x.size();
    Eigen::MatrixXd hess(m, m);
    const double f0 = f(x);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            if (i == j) {
                Eigen::VectorXd a = x;
                Eigen::VectorXd b = x;
                a(i) += h;
                b(i) -= h;
                hess(i, i) = (f(a) - 2.0 * f0 + f(b)) / (h * h);
                continue;
            }
            Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
            pp(i) += h, pp(j) += h;
            pm(i) += h, pm(j) -= h;
            mp(i) -= h, mp(j) += h;
            mm(i) -= h, mm(j) -= h;
            hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
        }
    }
    return hess;
}

/// Jacobian of a vector function by central differences.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6)
{
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd jac(f0.size(), x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        Eigen::VectorXd a = x;
        Eigen::VectorXd b = x;
        a(j) += h;
        b(j) -= h;
        jac.col(j) = (f(a) - f(b)) / (2.0 * h);
    }
    return jac;
}

/// d eta = (1/2) D_jk dx^j ^ dx^k with D_jk = d_j eta_k - d_k eta_j, from the
/// Jacobian of the form's coefficients; (iota_v d eta)_k = sum_j v^j D_jk.
inline Eigen::MatrixXd two_form_matrix(const Eigen::MatrixXd& eta_jacobian)
{
    // eta_jacobian(k, j) = d eta_k / d x^j
    return eta_jacobian.transpose() - eta_jacobian;
}

/// Flat map written out from its definition: v -> iota_v d eta + eta(v) eta.
inline Eigen::VectorXd flat_by_definition(const Eigen::VectorXd& eta, const Eigen::MatrixXd& eta_jacobian,
                                          const Eigen::VectorXd& v)
{
    const Eigen::MatrixXd d = two_form_matrix(eta_jacobian);
    return d.transpose() * v + eta.dot(v) * eta;
}

/// Darboux form eta = dz - p dq on (q, p, z) and its coefficient Jacobian.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> darboux_form(const Eigen::VectorXd& x)
{
    const Eigen::Index n = (x.size() - 1) / 2;
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(x.size());
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(x.size(), x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        eta(i) = -x(n + i);
        jac(i, n + i) = -1.0;
    }
    eta(2 * n) = 1.0;
    return {eta, jac};
}

/// Random Lagrangian on lagrangian_chart(n) whose velocity Hessian stays positive
/// definite on [-1, 1]^(2n+1), with position, z and velocity couplings.
inline std::string random_lagrangian(Rng& rng, std::size_t n)
{
    const contact::Chart qz = contact::extended_configuration_chart(n);
    std::string out = random_polynomial(rng, qz, 3, 5);
    for (std::size_t i = 1; i <= n; ++i) {
        const std::string qi = "q" + std::to_string(i);
        const std::string vi = "qd" + std::to_string(i);
        out += " + 0.5*(1 + " + number(rng.uniform(0.0, 0.5)) + "*" + qi + "^2 + " + number(rng.uniform(-0.2, 0.2)) +
               "*z)*" + vi + "^2";
        out += " + (" + random_polynomial(rng, qz, 2, 2) + ")*" + vi;
        if (i > 1) {
            out += " + " + number(rng.uniform(-0.1, 0.1)) + "*q1*qd1*" + vi;
        }
    }
    return out;
}

/// Random field on Q with polynomial components of degree <= 2.
inline std::vector<std::string> random_components(Rng& rng, const contact::Chart& vars, std::size_t count)
{
    std::vector<std::string> out;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(random_polynomial(rng, vars, 2, 3));
    }
    return out;
}

inline double max_abs(const Eigen::VectorXd& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

} // namespace testing
