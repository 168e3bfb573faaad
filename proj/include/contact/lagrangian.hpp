#pragma once

// Contact Lagrangian systems on TQ x R, chart (q1..qn, qd1..qdn, z).
//
// The system is the contact Hamiltonian system (TQ x R, eta_L, E_L) with
//   eta_L = dz - (dL/dqd^i) dq^i,   E_L = qd^i dL/dqd^i - L,
// and its Hamiltonian field xi_L is the Herglotz second-order field
//   q' = qd,  W qd' = b,  z' = L,
//   b_i = L_{q^i} + L_z L_{qd^i} - L_{qd^i q^j} qd^j - L_{qd^i z} L,
// with W = (L_{qd^i qd^j}) the velocity Hessian.

#include "contact/contact_core.hpp"
#include "contact/trajectory.hpp"

#include <stdexcept>

namespace contact {

inline constexpr double default_regularity_threshold = 1e-10;

class RegularityError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

struct TQRPoint
{
    Eigen::VectorXd q;
    Eigen::VectorXd v;
    double z = 0.0;

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(q.size()); }
    [[nodiscard]] Point to_vector() const;
    static TQRPoint from_vector(const Point& x);
};

/// Tangent vector on the (q, qd, z) chart.
struct TQRTangent
{
    Eigen::VectorXd dq;
    Eigen::VectorXd dv;
    double dz = 0.0;

    [[nodiscard]] Eigen::VectorXd to_vector() const;
    static TQRTangent from_vector(const Eigen::VectorXd& v);
};

/// Covector on the (q, qd, z) chart: cq dq + cv dqd + cz dz.
struct TQRCovector
{
    Eigen::VectorXd cq;
    Eigen::VectorXd cv;
    double cz = 0.0;

    static TQRCovector from_vector(const Eigen::VectorXd& v);
};

class LagrangianSystem final : public ContactSystem
{
public:
    /// L must be a field over lagrangian_chart(n).
    LagrangianSystem(std::size_t n, ScalarField lagrangian,
                     double regularity_threshold = default_regularity_threshold);

    static LagrangianSystem parse(std::string_view source, std::size_t n, Parameters parameters = {});

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] const ScalarField& lagrangian() const noexcept { return l_; }
    [[nodiscard]] double regularity_threshold() const noexcept { return threshold_; }

    [[nodiscard]] Jet2 lagrangian_jet(const Point& x) const { return l_.jet(as_span(x)); }
    [[nodiscard]] double energy(const Point& x) const;
    [[nodiscard]] Eigen::VectorXd momenta(const Point& x) const;
    [[nodiscard]] Eigen::MatrixXd velocity_hessian(const Point& x) const;
    [[nodiscard]] bool is_regular(const Point& x) const;
    /// Solves W a = b; throws RegularityError where W is singular.
    [[nodiscard]] Eigen::VectorXd acceleration(const Point& x) const;

    // ContactStructure
    [[nodiscard]] std::size_t dimension() const override { return 2 * n_ + 1; }
    [[nodiscard]] ContactFormJet form_at(const Point& x) const override;
    /// R_L = d/dz - W^{-1} L_{qd z} d/dqd.
    [[nodiscard]] Eigen::VectorXd reeb_at(const Point& x) const override;
    [[nodiscard]] std::shared_ptr<const ContactStructure> share() const override;

    // ContactSystem with H = E_L
    [[nodiscard]] Jet1 hamiltonian_at(const Point& x) const override;
    [[nodiscard]] Eigen::VectorXd hamiltonian_vf_at(const Point& x) const override;
    /// Jacobian of xi_L; the acceleration rows use central differences (step 1e-5)
    /// since they would need third derivatives of L.
    [[nodiscard]] FieldJet hamiltonian_vf_jet_at(const Point& x) const override;

    /// E_L as an observable on the chart.
    [[nodiscard]] Observable energy_observable() const;

private:
    std::size_t n_;
    ScalarField l_;
    double threshold_;
};

double energy_at(const LagrangianSystem& sys, const TQRPoint& x);
Eigen::VectorXd momenta_at(const LagrangianSystem& sys, const TQRPoint& x);
TQRCovector eta_L_at(const LagrangianSystem& sys, const TQRPoint& x);
Eigen::MatrixXd hessian_at(const LagrangianSystem& sys, const TQRPoint& x);
bool is_regular(const LagrangianSystem& sys, const TQRPoint& x);
TQRTangent reeb_L_at(const LagrangianSystem& sys, const TQRPoint& x);
TQRTangent xi_L_at(const LagrangianSystem& sys, const TQRPoint& x);
/// (q, qd, z) -> (q, dL/dqd, z).
ContactPoint legendre_at(const LagrangianSystem& sys, const TQRPoint& x);

/// Max over interior nodes of |d/dt(L_qd) - L_q - L_qd L_z|, with d/dt by central differences.
/// Throws std::invalid_argument for fewer than 3 samples.
double herglotz_residual(const LagrangianSystem& sys, const Trajectory& traj);

} // namespace contact
