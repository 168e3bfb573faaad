#include "contact/integrate.hpp"

#include <cmath>

namespace contact {

namespace {

Point step_once(const VectorFieldFunction& f, const Point& x, double h, Method method)
{
    const Eigen::VectorXd k1 = f(x);
    if (method == Method::euler) {
        return x + h * k1;
    }
    const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(x + h * k3);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void sample_monitors(Trajectory& traj, const std::vector<Monitor>& monitors, const Point& x)
{
    for (const auto& m : monitors) {
        traj.monitors[m.name].push_back(m.field.value_at(x));
    }
}

IntegratorConfig with_leading_monitor(const IntegratorConfig& cfg, Monitor first)
{
    IntegratorConfig out = cfg;
    out.monitors.insert(out.monitors.begin(), std::move(first));
    return out;
}

} // namespace

void IntegratorConfig::validate() const
{
    if (!std::isfinite(step) || !std::isfinite(t_final) || !(step > 0.0) || !(step <= t_final)) {
        throw std::invalid_argument("integrator needs 0 < step <= t_final");
    }
}

std::size_t IntegratorConfig::steps() const
{
    validate();
    return static_cast<std::size_t>(std::floor(t_final / step + 1e-9));
}

IntegrationResult integrate(const VectorFieldFunction& f, const Point& x0, const IntegratorConfig& cfg)
{
    const std::size_t n_steps = cfg.steps();
    IntegrationResult result;
    Trajectory& traj = result.trajectory;
    traj.step = cfg.step;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);
    for (const auto& m : cfg.monitors) {
        traj.monitors[m.name].reserve(n_steps + 1);
    }

    if (!x0.allFinite()) {
        result.error = "initial state is not finite";
        return result;
    }
    Point x = x0;
    try {
        traj.times.push_back(0.0);
        traj.states.push_back(x);
        sample_monitors(traj, cfg.monitors, x);
        for (std::size_t k = 1; k <= n_steps; ++k) {
            Point next = step_once(f, x, cfg.step, cfg.method);
            const double t = static_cast<double>(k) * cfg.step;
            if (!next.allFinite()) {
                result.error = "state became non-finite at t = " + std::to_string(t);
                return result;
            }
            x = std::move(next);
            traj.times.push_back(t);
            traj.states.push_back(x);
            sample_monitors(traj, cfg.monitors, x);
        }
    } catch (const std::domain_error& e) {
        // Keep the trajectory consistent: drop a node whose monitors could not all be sampled.
        const std::size_t reached = traj.times.size();
        for (auto& [name, series] : traj.monitors) {
            if (series.size() < reached) {
                traj.times.resize(series.size());
                traj.states.resize(series.size());
                break;
            }
        }
        for (auto& [name, series] : traj.monitors) {
            series.resize(traj.times.size());
        }
        const double t = traj.times.empty() ? 0.0 : traj.times.back();
        result.error = std::string(e.what()) + " (after t = " + std::to_string(t) + ")";
    }
    return result;
}

IntegrationResult integrate_lagrangian(const LagrangianSystem& sys, const TQRPoint& ic, const IntegratorConfig& cfg)
{
    if (ic.n() != sys.n()) {
        throw std::invalid_argument("initial state has the wrong dimension");
    }
    return integrate([&sys](const Point& x) { return sys.hamiltonian_vf_at(x); }, ic.to_vector(),
                     with_leading_monitor(cfg, {"E_L", sys.energy_observable()}));
}

IntegrationResult integrate_hamiltonian(const HamiltonianSystem& sys, const ContactPoint& ic,
                                        const IntegratorConfig& cfg)
{
    if (static_cast<std::size_t>(ic.q.size()) != sys.n()) {
        throw std::invalid_argument("initial state has the wrong dimension");
    }
    return integrate([&sys](const Point& x) { return sys.hamiltonian_vf_at(x); }, ic.to_vector(),
                     with_leading_monitor(cfg, {"H", Observable(sys.hamiltonian())}));
}

} // namespace contact
