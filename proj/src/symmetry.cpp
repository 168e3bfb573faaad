#include "contact/symmetry.hpp"

#include <algorithm>
#include <cmath>

namespace contact {

namespace {

void require_points(const SamplePoints& points)
{
    if (points.empty()) {
        throw std::invalid_argument("symmetry check needs a nonempty sample of points");
    }
}

void require_nodes(const Trajectory& traj)
{
    if (traj.size() < 3 || traj.states.size() != traj.size()) {
        throw std::invalid_argument("trajectory check needs at least 3 nodes");
    }
}

std::vector<double> values_along(const Observable& f, const Trajectory& traj)
{
    std::vector<double> out;
    out.reserve(traj.size());
    for (const auto& s : traj.states) {
        out.push_back(f.value_at(s));
    }
    return out;
}

double z_rate(const LagrangianSystem& sys, const Point& x)
{
    return sys.lagrangian_jet(x).gradient()(static_cast<Eigen::Index>(2 * sys.n()));
}

Observable lift_observable(const LagrangianSystem& sys, const VectorFieldQR& y)
{
    return apply_field(vertical_lift_field(y), sys.lagrangian()) - z_component_observable(y);
}

bool is_field_on_q(const VectorFieldQR& y)
{
    const ScalarField& z = y.z_component();
    if (!z.chart_dependencies().empty() || z.value(std::array<double, 1>{0.0}) != 0.0) {
        return false;
    }
    return std::all_of(y.q_components().begin(), y.q_components().end(),
                       [](const ScalarField& c) { return !c.chart_dependencies().contains("z"); });
}

} // namespace

double infinitesimal_symmetry_residual(const LagrangianSystem& sys, const VectorFieldQ& y, const SamplePoints& points)
{
    require_points(points);
    const AmbientVectorField yc = complete_lift_field(y);
    double worst = 0.0;
    for (const auto& pt : points) {
        worst = std::max(worst, std::abs(sys.lagrangian_jet(pt).gradient().dot(yc.value_at(pt))));
    }
    return worst;
}

Observable dissipated_for_infinitesimal(const LagrangianSystem& sys, const VectorFieldQ& y)
{
    return apply_field(vertical_lift_field(y), sys.lagrangian()).relabeled("Y^V(L)");
}

Observable dissipated_for_lift(const LagrangianSystem& sys, const VectorFieldQR& y)
{
    return lift_observable(sys, y).relabeled("Y^V(L) - Z");
}

ResidualWithField generalized_symmetry_residual(const LagrangianSystem& sys, const VectorFieldQR& y,
                                                const SamplePoints& points)
{
    require_points(points);
    const AmbientVectorField yc = complete_lift_field(y);
    ResidualWithField out{0.0, dissipated_for_lift(sys, y)};
    for (const auto& pt : points) {
        const Jet2 l = sys.lagrangian_jet(pt);
        const double reeb_f = out.f.jet_at(pt).gradient.dot(sys.reeb_at(pt));
        out.residual = std::max(out.residual, std::abs(l.gradient().dot(yc.value_at(pt)) + reeb_f * l.value()));
    }
    return out;
}

NoetherCheck noether_symmetry_check(const LagrangianSystem& sys, const VectorFieldQR& y, const Observable& a,
                                    const Observable& g, const SamplePoints& points)
{
    require_points(points);
    const CartanSymmetryCheck c = check_cartan_symmetry(sys, complete_lift_field(y), a, g, points);
    return {c.residual_form, c.residual_energy,
            (lift_observable(sys, y) + g).relabeled("Y^V(L) - Z + (" + g.label() + ")")};
}

ResidualWithField lie_symmetry_residual(const LagrangianSystem& sys, const VectorFieldQR& y,
                                        const SamplePoints& points)
{
    require_points(points);
    const DynamicalSymmetryCheck c = check_dynamical_symmetry(sys, complete_lift_field(y), points);
    return {c.residual, dissipated_for_lift(sys, y)};
}

std::vector<double> z_rate_integral(const LagrangianSystem& sys, const Trajectory& traj)
{
    std::vector<double> integral(traj.size(), 0.0);
    if (traj.size() == 0) {
        return integral;
    }
    double previous = z_rate(sys, traj.states[0]);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double current = z_rate(sys, traj.states[k]);
        integral[k] = integral[k - 1] + 0.5 * (traj.times[k] - traj.times[k - 1]) * (previous + current);
        previous = current;
    }
    return integral;
}

TrajectoryDissipation dissipation_check_along_trajectory(const LagrangianSystem& sys, const Observable& f,
                                                         const Trajectory& traj)
{
    require_nodes(traj);
    const std::vector<double> fv = values_along(f, traj);
    const std::vector<double> integral = z_rate_integral(sys, traj);
    TrajectoryDissipation out;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        const double dfdt = (fv[k + 1] - fv[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
        out.rate_residual = std::max(out.rate_residual, std::abs(dfdt - z_rate(sys, traj.states[k]) * fv[k]));
    }
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out.deviation = std::max(out.deviation, std::abs(fv[k] * std::exp(-integral[k]) - fv[0]));
    }
    return out;
}

std::vector<double> georgieva_functional(const LagrangianSystem& sys, const Observable& f, const Trajectory& traj)
{
    require_nodes(traj);
    const std::vector<double> fv = values_along(f, traj);
    const std::vector<double> integral = z_rate_integral(sys, traj);
    std::vector<double> g(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        g[k] = std::exp(-integral[k]) * fv[k];
    }
    return g;
}

std::optional<double> quotient_deviation(const LagrangianSystem& sys, const Observable& f, const Trajectory& traj,
                                         double min_energy)
{
    require_nodes(traj);
    std::vector<double> ratio;
    ratio.reserve(traj.size());
    for (const auto& s : traj.states) {
        const double e = sys.energy(s);
        if (!(std::abs(e) >= min_energy)) {
            return std::nullopt;
        }
        ratio.push_back(f.value_at(s) / e);
    }
    double worst = 0.0;
    for (double r : ratio) {
        worst = std::max(worst, std::abs(r - ratio.front()));
    }
    return worst;
}

std::string to_string(SymmetryClass c)
{
    switch (c) {
    case SymmetryClass::infinitesimal:
        return "infinitesimal";
    case SymmetryClass::generalized:
        return "generalized";
    case SymmetryClass::noether:
        return "noether";
    case SymmetryClass::lie:
        return "lie";
    }
    return "unknown";
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::indeterminate:
        return "indeterminate";
    case Verdict::not_tested:
        return "not_tested";
    }
    return "unknown";
}

Verdict judge(double residual, double tolerance, double fail_factor)
{
    if (!std::isfinite(residual)) {
        return Verdict::indeterminate;
    }
    if (residual <= tolerance) {
        return Verdict::pass;
    }
    return residual > fail_factor * tolerance ? Verdict::fail : Verdict::indeterminate;
}

VectorFieldQR SymmetryCandidate::as_qr() const
{
    if (const auto* y = std::get_if<VectorFieldQ>(&field)) {
        return VectorFieldQR(*y);
    }
    return std::get<VectorFieldQR>(field);
}

SymmetryReport classify(const LagrangianSystem& sys, const SymmetryCandidate& candidate, const SamplePoints& points,
                        const Trajectory* traj, const SymmetryTolerances& tol, const SampleSpec& sample)
{
    require_points(points);
    const VectorFieldQR y = candidate.as_qr();
    if (y.n() != sys.n()) {
        throw std::invalid_argument("candidate '" + candidate.name + "' has the wrong number of components");
    }

    SymmetryReport report;
    report.candidate = candidate.name;
    report.sample = sample;
    report.sample_count = points.size();
    auto slot = [&report](SymmetryClass c) -> ClassResult& { return report.classes[static_cast<std::size_t>(c)]; };
    auto record = [&](SymmetryClass c, double residual, double tolerance) {
        slot(c) = {judge(residual, tolerance, tol.fail_factor), residual, tolerance, {}};
    };

    const Observable lift_f = dissipated_for_lift(sys, y);

    if (const auto* yq = std::get_if<VectorFieldQ>(&candidate.field)) {
        record(SymmetryClass::infinitesimal, infinitesimal_symmetry_residual(sys, *yq, points), tol.exact);
    } else {
        const AmbientVectorField yc = complete_lift_field(y);
        double residual = 0.0;
        for (const auto& pt : points) {
            residual = std::max(residual, std::abs(sys.lagrangian_jet(pt).gradient().dot(yc.value_at(pt))));
        }
        record(SymmetryClass::infinitesimal, residual, tol.exact);
        if (!is_field_on_q(y)) {
            slot(SymmetryClass::infinitesimal).verdict = Verdict::fail;
            slot(SymmetryClass::infinitesimal).note = "not a field on Q";
        }
    }

    record(SymmetryClass::generalized, generalized_symmetry_residual(sys, y, points).residual, tol.exact);

    const std::size_t dim = sys.dimension();
    const CartanData cartan = candidate.cartan_data.value_or(
        CartanData{Observable::constant(0.0, dim), Observable::constant(0.0, dim)});
    const NoetherCheck noether = noether_symmetry_check(sys, y, cartan.a, cartan.g, points);
    record(SymmetryClass::noether, std::max(noether.residual_form, noether.residual_energy), tol.exact);
    if (!candidate.cartan_data) {
        slot(SymmetryClass::noether).note = "a = 0, g = 0";
    }

    try {
        record(SymmetryClass::lie, lie_symmetry_residual(sys, y, points).residual, tol.lie);
    } catch (const RegularityError& e) {
        slot(SymmetryClass::lie) = {Verdict::not_tested, 0.0, tol.lie, e.what()};
    }

    for (SymmetryClass c : all_symmetry_classes) {
        if (slot(c).verdict == Verdict::pass) {
            report.selected = c;
            break;
        }
    }

    const bool via_noether = report.selected == SymmetryClass::noether;
    report.dissipated_field = via_noether ? noether.f : lift_f;
    if (report.selected == SymmetryClass::infinitesimal) {
        report.dissipated_field = report.dissipated_field.relabeled("Y^V(L)");
    }
    report.dissipation_residual = dissipation_residual(sys, report.dissipated_field, points);
    report.dissipation_tolerance = tol.exact;
    if (traj != nullptr) {
        report.trajectory = dissipation_check_along_trajectory(sys, report.dissipated_field, *traj);
    }
    return report;
}

} // namespace contact
