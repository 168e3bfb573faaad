#pragma once

// Fixed-step integration of xi_L and X_H.

#include "contact/lagrangian.hpp"
#include "contact/trajectory.hpp"

#include <functional>
#include <optional>

namespace contact {

enum class Method
{
    rk4,
    euler,
};

struct Monitor
{
    std::string name;
    Observable field;
};

struct IntegratorConfig
{
    Method method = Method::rk4;
    double step = 1e-3;
    double t_final = 1.0;
    std::vector<Monitor> monitors;

    /// Throws std::invalid_argument unless 0 < step <= t_final (both finite).
    void validate() const;
    /// Number of steps; t_final is rounded down to a whole number of steps.
    [[nodiscard]] std::size_t steps() const;
};

struct IntegrationResult
{
    Trajectory trajectory;
    /// Set when integration stopped early; the trajectory then holds the nodes reached.
    std::optional<std::string> error;

    [[nodiscard]] bool ok() const noexcept { return !error.has_value(); }
};

using VectorFieldFunction = std::function<Eigen::VectorXd(const Point&)>;

/// Integrates x' = f(x); monitors are sampled at every node.
IntegrationResult integrate(const VectorFieldFunction& f, const Point& x0, const IntegratorConfig& cfg);

/// Monitors "E_L" and then cfg.monitors.
IntegrationResult integrate_lagrangian(const LagrangianSystem& sys, const TQRPoint& ic, const IntegratorConfig& cfg);

/// Monitors "H" and then cfg.monitors.
IntegrationResult integrate_hamiltonian(const HamiltonianSystem& sys, const ContactPoint& ic,
                                        const IntegratorConfig& cfg);

} // namespace contact
