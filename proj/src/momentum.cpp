#include "contact/momentum.hpp"

#include <algorithm>
#include <cmath>

namespace contact {

namespace {

void require_points(const SamplePoints& points)
{
    if (points.empty()) {
        throw std::invalid_argument("momentum check needs a nonempty sample of points");
    }
}

void require_chart(const GeneratorFamily& fam, std::size_t dimension)
{
    if (fam.dimension() != dimension) {
        throw std::invalid_argument("generator family '" + fam.label() + "' lives on a chart of dimension "
                                    + std::to_string(fam.dimension()) + ", expected "
                                    + std::to_string(dimension));
    }
}

} // namespace

GeneratorFamily::GeneratorFamily(std::string label, std::vector<AmbientVectorField> generators)
    : label_(std::move(label)), fields_(std::move(generators))
{
    if (fields_.empty()) {
        throw std::invalid_argument("generator family needs at least one generator");
    }
    for (const auto& f : fields_) {
        if (f.dimension() != fields_.front().dimension()) {
            throw std::invalid_argument("generators of one family must share a chart");
        }
    }
}

GeneratorFamily::GeneratorFamily(std::string label, std::vector<VectorFieldQ> generators, bool shift_z)
    : label_(std::move(label)), base_(std::move(generators)), lifted_(true), shift_z_(shift_z)
{
    if (base_.empty()) {
        throw std::invalid_argument("generator family needs at least one generator");
    }
    const std::size_t n = base_.front().n();
    for (const auto& y : base_) {
        if (y.n() != n) {
            throw std::invalid_argument("generators of one family must share a chart");
        }
        AmbientVectorField lift = complete_lift_field(y);
        if (shift_z_) {
            lift = lift + AmbientVectorField::coordinate(2 * n + 1, 2 * n);
        }
        fields_.push_back(std::move(lift));
    }
}

Eigen::VectorXd momentum_map_at(const GeneratorFamily& fam, const ContactStructure& s, const Point& x)
{
    require_chart(fam, s.dimension());
    const Eigen::VectorXd eta = s.form_at(x).eta;
    Eigen::VectorXd out(static_cast<Eigen::Index>(fam.size()));
    for (std::size_t k = 0; k < fam.size(); ++k) {
        out(static_cast<Eigen::Index>(k)) = -eta.dot(fam.fields()[k].value_at(x));
    }
    return out;
}

Eigen::VectorXd momentum_map_at(const GeneratorFamily& fam, const LagrangianSystem& sys, const TQRPoint& x)
{
    return momentum_map_at(fam, sys, x.to_vector());
}

std::vector<Observable> momentum_components(const GeneratorFamily& fam, const ContactStructure& s)
{
    require_chart(fam, s.dimension());
    std::vector<Observable> out;
    for (const auto& f : fam.fields()) {
        out.push_back(minus_eta_of(s, f).relabeled("J(" + f.label() + ")"));
    }
    return out;
}

MomentumDissipation momentum_dissipation_check(const GeneratorFamily& fam, const ContactSystem& sys,
                                               const SamplePoints& points, double tolerance)
{
    require_points(points);
    MomentumDissipation out;
    out.tolerance = tolerance;
    const std::vector<Observable> j = momentum_components(fam, sys);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        double invariance = 0.0;
        for (const auto& pt : points) {
            invariance = std::max(invariance, std::abs(sys.hamiltonian_at(pt).gradient.dot(fam.fields()[k].value_at(pt))));
        }
        out.invariance.push_back(invariance);
        out.hypothesis_holds = out.hypothesis_holds && invariance <= tolerance;
        out.residuals.push_back(dissipation_residual(sys, j[k], points));
    }
    return out;
}

ReebAnnihilation reeb_annihilation_check(const GeneratorFamily& fam, const ContactStructure& s,
                                         const SamplePoints& points, double tolerance)
{
    require_points(points);
    ReebAnnihilation out;
    out.tolerance = tolerance;
    const std::vector<Observable> j = momentum_components(fam, s);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        double reeb = 0.0;
        double lie = 0.0;
        for (const auto& pt : points) {
            reeb = std::max(reeb, std::abs(j[k].jet_at(pt).gradient.dot(s.reeb_at(pt))));
            lie = std::max(lie, lie_derivative(s.form_at(pt), fam.fields()[k].jet_at(pt)).lpNorm<Eigen::Infinity>());
        }
        out.residuals.push_back(reeb);
        out.lie_eta.push_back(lie);
        out.preserves_eta.push_back(lie <= tolerance);
    }
    return out;
}

} // namespace contact
