#include "contact/lagrangian.hpp"

#include <algorithm>
#include <cmath>

namespace contact {

namespace {

std::size_t half_dimension(Eigen::Index dim)
{
    if (dim < 3 || dim % 2 == 0) {
        throw std::invalid_argument("TQ x R chart dimension must be 2n+1 with n >= 1, got " + std::to_string(dim));
    }
    return static_cast<std::size_t>((dim - 1) / 2);
}

// Everything the dynamics needs at one point, from a single jet evaluation.
struct LocalData
{
    Jet2 l;
    Eigen::Index n;

    [[nodiscard]] auto lq() const { return l.gradient().head(n); }
    [[nodiscard]] auto lv() const { return l.gradient().segment(n, n); }
    [[nodiscard]] double lz() const { return l.gradient()(2 * n); }
    [[nodiscard]] Eigen::MatrixXd w() const { return l.hessian().block(n, n, n, n); }
    [[nodiscard]] auto lvq() const { return l.hessian().block(n, 0, n, n); }
    [[nodiscard]] auto lvz() const { return l.hessian().block(n, 2 * n, n, 1); }
};

bool regular(const Eigen::MatrixXd& w, double threshold)
{
    const double scale = w.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
        return false;
    }
    const double det = w.determinant();
    return std::abs(det) > threshold * std::pow(scale, static_cast<double>(w.rows()));
}

Eigen::VectorXd solve_velocity_system(const Eigen::MatrixXd& w, const Eigen::VectorXd& rhs, double threshold)
{
    if (!regular(w, threshold)) {
        throw RegularityError("velocity Hessian is singular at this point");
    }
    return w.partialPivLu().solve(rhs);
}

} // namespace

Point TQRPoint::to_vector() const
{
    if (q.size() != v.size() || q.size() < 1) {
        throw std::invalid_argument("TQ x R point needs |q| = |v| >= 1");
    }
    Point x(2 * q.size() + 1);
    x << q, v, z;
    return x;
}

TQRPoint TQRPoint::from_vector(const Point& x)
{
    const auto n = static_cast<Eigen::Index>(half_dimension(x.size()));
    return {x.head(n), x.segment(n, n), x(2 * n)};
}

Eigen::VectorXd TQRTangent::to_vector() const
{
    Eigen::VectorXd out(2 * dq.size() + 1);
    out << dq, dv, dz;
    return out;
}

TQRTangent TQRTangent::from_vector(const Eigen::VectorXd& v)
{
    const auto n = static_cast<Eigen::Index>(half_dimension(v.size()));
    return {v.head(n), v.segment(n, n), v(2 * n)};
}

TQRCovector TQRCovector::from_vector(const Eigen::VectorXd& v)
{
    const auto n = static_cast<Eigen::Index>(half_dimension(v.size()));
    return {v.head(n), v.segment(n, n), v(2 * n)};
}

LagrangianSystem::LagrangianSystem(std::size_t n, ScalarField lagrangian, double regularity_threshold)
    : n_(n), l_(std::move(lagrangian)), threshold_(regularity_threshold)
{
    if (n == 0) {
        throw std::invalid_argument("Lagrangian system needs n >= 1");
    }
    if (l_.chart() != lagrangian_chart(n)) {
        throw std::invalid_argument("Lagrangian must be defined over the chart (q1..qn, qd1..qdn, z)");
    }
}

LagrangianSystem LagrangianSystem::parse(std::string_view source, std::size_t n, Parameters parameters)
{
    return LagrangianSystem(n, ScalarField::parse(source, lagrangian_chart(n), std::move(parameters)));
}

double LagrangianSystem::energy(const Point& x) const
{
    const auto n = static_cast<Eigen::Index>(n_);
    const Jet2 l = lagrangian_jet(x);
    return x.segment(n, n).dot(l.gradient().segment(n, n)) - l.value();
}

Eigen::VectorXd LagrangianSystem::momenta(const Point& x) const
{
    const auto n = static_cast<Eigen::Index>(n_);
    return lagrangian_jet(x).gradient().segment(n, n);
}

Eigen::MatrixXd LagrangianSystem::velocity_hessian(const Point& x) const
{
    const auto n = static_cast<Eigen::Index>(n_);
    return lagrangian_jet(x).hessian().block(n, n, n, n);
}

bool LagrangianSystem::is_regular(const Point& x) const
{
    return regular(velocity_hessian(x), threshold_);
}

Eigen::VectorXd LagrangianSystem::acceleration(const Point& x) const
{
    const LocalData d{lagrangian_jet(x), static_cast<Eigen::Index>(n_)};
    const auto v = x.segment(d.n, d.n);
    const Eigen::VectorXd b = d.lq() + d.lz() * d.lv() - d.lvq() * v - d.lvz() * d.l.value();
    return solve_velocity_system(d.w(), b, threshold_);
}

ContactFormJet LagrangianSystem::form_at(const Point& x) const
{
    const LocalData d{lagrangian_jet(x), static_cast<Eigen::Index>(n_)};
    const Eigen::Index dim = 2 * d.n + 1;
    ContactFormJet form{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
    form.eta.head(d.n) = -d.lv();
    form.eta(2 * d.n) = 1.0;
    form.jacobian.topRows(d.n) = -d.l.hessian().middleRows(d.n, d.n);
    return form;
}

Eigen::VectorXd LagrangianSystem::reeb_at(const Point& x) const
{
    const LocalData d{lagrangian_jet(x), static_cast<Eigen::Index>(n_)};
    Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * d.n + 1);
    r.segment(d.n, d.n) = -solve_velocity_system(d.w(), d.lvz(), threshold_);
    r(2 * d.n) = 1.0;
    return r;
}

std::shared_ptr<const ContactStructure> LagrangianSystem::share() const
{
    return std::make_shared<LagrangianSystem>(*this);
}

Jet1 LagrangianSystem::hamiltonian_at(const Point& x) const
{
    const LocalData d{lagrangian_jet(x), static_cast<Eigen::Index>(n_)};
    const auto v = x.segment(d.n, d.n);
    Jet1 e{v.dot(d.lv()) - d.l.value(), Eigen::VectorXd()};
    // dE = v^i d(L_{v^i}) + L_{v^i} dv^i - dL
    e.gradient = d.l.hessian().middleRows(d.n, d.n).transpose() * v;
    e.gradient.segment(d.n, d.n) += d.lv();
    e.gradient -= d.l.gradient();
    return e;
}

Eigen::VectorXd LagrangianSystem::hamiltonian_vf_at(const Point& x) const
{
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::VectorXd xi(2 * n + 1);
    xi.head(n) = x.segment(n, n);
    xi.segment(n, n) = acceleration(x);
    xi(2 * n) = l_.value(as_span(x));
    return xi;
}

FieldJet LagrangianSystem::hamiltonian_vf_jet_at(const Point& x) const
{
    constexpr double step = 1e-5;
    const auto n = static_cast<Eigen::Index>(n_);
    const Eigen::Index dim = 2 * n + 1;
    FieldJet out{hamiltonian_vf_at(x), Eigen::MatrixXd::Zero(dim, dim)};
    for (Eigen::Index i = 0; i < n; ++i) {
        out.jacobian(i, n + i) = 1.0;
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
        Point plus = x;
        Point minus = x;
        plus(j) += step;
        minus(j) -= step;
        out.jacobian.block(n, j, n, 1) = (acceleration(plus) - acceleration(minus)) / (2.0 * step);
    }
    out.jacobian.row(2 * n) = lagrangian_jet(x).gradient().transpose();
    return out;
}

Observable LagrangianSystem::energy_observable() const
{
    auto self = std::static_pointer_cast<const LagrangianSystem>(share());
    return Observable(
        dimension(),
        [self](std::span<const double> xs) {
            return self->hamiltonian_at(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
        },
        "E_L");
}

double energy_at(const LagrangianSystem& sys, const TQRPoint& x)
{
    return sys.energy(x.to_vector());
}

Eigen::VectorXd momenta_at(const LagrangianSystem& sys, const TQRPoint& x)
{
    return sys.momenta(x.to_vector());
}

TQRCovector eta_L_at(const LagrangianSystem& sys, const TQRPoint& x)
{
    return TQRCovector::from_vector(sys.form_at(x.to_vector()).eta);
}

Eigen::MatrixXd hessian_at(const LagrangianSystem& sys, const TQRPoint& x)
{
    return sys.velocity_hessian(x.to_vector());
}

bool is_regular(const LagrangianSystem& sys, const TQRPoint& x)
{
    return sys.is_regular(x.to_vector());
}

TQRTangent reeb_L_at(const LagrangianSystem& sys, const TQRPoint& x)
{
    return TQRTangent::from_vector(sys.reeb_at(x.to_vector()));
}

TQRTangent xi_L_at(const LagrangianSystem& sys, const TQRPoint& x)
{
    return TQRTangent::from_vector(sys.hamiltonian_vf_at(x.to_vector()));
}

ContactPoint legendre_at(const LagrangianSystem& sys, const TQRPoint& x)
{
    return {x.q, momenta_at(sys, x), x.z};
}

double herglotz_residual(const LagrangianSystem& sys, const Trajectory& traj)
{
    if (traj.size() < 3 || traj.states.size() != traj.size()) {
        throw std::invalid_argument("Herglotz residual needs at least 3 uniformly spaced samples");
    }
    const double h = traj.times[1] - traj.times[0];
    if (!(h > 0.0)) {
        throw std::invalid_argument("trajectory times must be strictly increasing");
    }
    const auto n = static_cast<Eigen::Index>(sys.n());
    std::vector<Eigen::VectorXd> momenta;
    momenta.reserve(traj.size());
    for (const auto& s : traj.states) {
        momenta.push_back(sys.momenta(s));
    }
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        const Jet2 l = sys.lagrangian_jet(traj.states[k]);
        const Eigen::VectorXd dpdt = (momenta[k + 1] - momenta[k - 1]) / (2.0 * h);
        const Eigen::VectorXd r =
            dpdt - l.gradient().head(n) - l.gradient()(2 * n) * l.gradient().segment(n, n);
        worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

} // namespace contact
