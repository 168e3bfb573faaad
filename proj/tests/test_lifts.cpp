#include "contact/lifts.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace contact;

namespace {

TQRPoint tqr(std::vector<double> q, std::vector<double> v, double z)
{
    return {Eigen::Map<Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size())),
            Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())), z};
}

VectorFieldQ random_q_field(testing::Rng& rng, std::size_t n)
{
    return VectorFieldQ::parse(testing::random_components(rng, configuration_chart(n), n));
}

VectorFieldQR random_qr_field(testing::Rng& rng, std::size_t n)
{
    return VectorFieldQR::parse(testing::random_components(rng, extended_configuration_chart(n), n),
                                testing::random_polynomial(rng, Chart{"z"}, 2, 2));
}

/// Complete lift written out by hand: (Y, (dY/dq) v, Z) with the Jacobian taken by differences.
Eigen::VectorXd complete_lift_oracle(const VectorFieldQR& y, const Point& x)
{
    const auto n = static_cast<Eigen::Index>(y.n());
    auto y_at = [&](const Eigen::VectorXd& qz) {
        Eigen::VectorXd out(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i) = y.q_components()[static_cast<std::size_t>(i)].value(as_span(qz));
        }
        return out;
    };
    Eigen::VectorXd qz(n + 1);
    qz << x.head(n), x(2 * n);
    const Eigen::MatrixXd jac = testing::fd_jacobian(y_at, qz);
    Eigen::VectorXd out(2 * n + 1);
    out.head(n) = y_at(qz);
    out.segment(n, n) = jac.leftCols(n) * x.segment(n, n);
    out(2 * n) = y.z_component().value(std::vector<double>{x(2 * n)});
    return out;
}

} // namespace

TEST_CASE("vertical lift on Q")
{
    const VectorFieldQ dq1 = VectorFieldQ::parse({"1", "0"});
    CHECK(vertical_lift_Q(dq1, tqr({0.3, 0.1}, {1, 2}, 0.5)).to_vector() ==
          (Eigen::VectorXd(5) << 0, 0, 1, 0, 0).finished());
    const VectorFieldQ scale = VectorFieldQ::parse({"q1"});
    CHECK(vertical_lift_Q(scale, tqr({2}, {0.1}, 0)).dv == Eigen::VectorXd::Constant(1, 2.0));
}

TEST_CASE("complete lift on Q")
{
    CHECK(complete_lift_Q(VectorFieldQ::parse({"1", "0"}), tqr({0.3, 0.1}, {1, 2}, 0.5)).to_vector() ==
          (Eigen::VectorXd(5) << 1, 0, 0, 0, 0).finished());
    const TQRTangent s = complete_lift_Q(VectorFieldQ::parse({"q1"}), tqr({1}, {3}, 0));
    CHECK(s.dq(0) == 1.0);
    CHECK(s.dv(0) == 3.0);
    const TQRTangent r = complete_lift_Q(VectorFieldQ::parse({"-q2", "q1"}), tqr({1, 0}, {0, 1}, 0));
    CHECK(r.dq == Eigen::Vector2d(0, 1));
    CHECK(r.dv == Eigen::Vector2d(-1, 0));
    CHECK(r.dz == 0.0);
}

TEST_CASE("lifts of fields on Q x R")
{
    const VectorFieldQR dz = VectorFieldQR::parse({"0"}, "1");
    CHECK(complete_lift_QR(dz, tqr({0.2}, {0.3}, 0.4)).to_vector() == Eigen::Vector3d(0, 0, 1));
    CHECK(vertical_lift_QR(dz, tqr({0.2}, {0.3}, 0.4)).to_vector().isZero(0.0));

    const VectorFieldQR scaling = VectorFieldQR::parse({"q1"}, "2*z");
    CHECK(complete_lift_QR(scaling, tqr({1}, {1}, 0)).to_vector() == Eigen::Vector3d(1, 1, 0));
    CHECK(vertical_lift_QR(scaling, tqr({2}, {0.5}, 0.1)).dv == Eigen::VectorXd::Constant(1, 2.0));
}

TEST_CASE("tangency and chart restrictions")
{
    CHECK_THROWS_AS(VectorFieldQR::parse({"0"}, "q1"), TangencyError);
    CHECK_THROWS_AS(VectorFieldQR::parse({"0"}, "z + qd1"), TangencyError);
    CHECK_THROWS_AS(VectorFieldQ::parse({"z"}), TangencyError);
    CHECK_THROWS_AS(VectorFieldQ::parse({"qd1"}), TangencyError);
    CHECK_THROWS_AS(VectorFieldQR::parse({"qd1"}, "0"), TangencyError);
    CHECK_NOTHROW(VectorFieldQR::parse({"q1*z"}, "z^2"));
}

TEST_CASE("lifts agree with the hand-written formulas")
{
    testing::Rng rng(31);
    for (std::size_t n = 1; n <= 3; ++n) {
        const VectorFieldQR y = random_qr_field(rng, n);
        const VectorFieldQ yq = random_q_field(rng, n);
        const AmbientVectorField yc = complete_lift_field(y);
        const AmbientVectorField yv = vertical_lift_field(y);
        for (int k = 0; k < 30; ++k) {
            const Point x = rng.vector(static_cast<Eigen::Index>(2 * n + 1));
            const TQRPoint p = TQRPoint::from_vector(x);
            const Eigen::VectorXd c = complete_lift_QR(y, p).to_vector();
            CHECK(testing::max_abs(c - complete_lift_oracle(y, x)) <= 1e-8);
            CHECK(testing::max_abs(yc.value_at(x) - c) == 0.0);
            CHECK(testing::max_abs(yv.value_at(x) - vertical_lift_QR(y, p).to_vector()) == 0.0);

            // S(Y^C) = Y^V: the position slot of the complete lift is the velocity slot of the vertical lift
            CHECK(complete_lift_QR(y, p).dq == vertical_lift_QR(y, p).dv);
            CHECK(complete_lift_Q(yq, p).dq == vertical_lift_Q(yq, p).dv);
            CHECK(testing::max_abs(complete_lift_Q(yq, p).to_vector() -
                                   complete_lift_QR(VectorFieldQR(yq), p).to_vector()) == 0.0);

            const FieldJet jc = yc.jet_at(x);
            const Eigen::MatrixXd fd = testing::fd_jacobian([&](const Eigen::VectorXd& w) { return yc.value_at(w); }, x);
            CHECK((jc.jacobian - fd).cwiseAbs().maxCoeff() <= 1e-8);
            const FieldJet jv = yv.jet_at(x);
            const Eigen::MatrixXd fdv = testing::fd_jacobian([&](const Eigen::VectorXd& w) { return yv.value_at(w); }, x);
            CHECK((jv.jacobian - fdv).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("lifts are linear")
{
    testing::Rng rng(32);
    const std::size_t n = 2;
    const auto a = testing::random_components(rng, configuration_chart(n), n);
    const auto b = testing::random_components(rng, configuration_chart(n), n);
    std::vector<std::string> sum;
    for (std::size_t i = 0; i < n; ++i) {
        sum.push_back("2*(" + a[i] + ") - 3*(" + b[i] + ")");
    }
    const VectorFieldQ ya = VectorFieldQ::parse(a);
    const VectorFieldQ yb = VectorFieldQ::parse(b);
    const VectorFieldQ ys = VectorFieldQ::parse(sum);
    for (int k = 0; k < 20; ++k) {
        const TQRPoint p = TQRPoint::from_vector(rng.vector(5));
        const Eigen::VectorXd c = 2.0 * complete_lift_Q(ya, p).to_vector() - 3.0 * complete_lift_Q(yb, p).to_vector();
        CHECK(testing::max_abs(complete_lift_Q(ys, p).to_vector() - c) <= 1e-12);
        const Eigen::VectorXd v = 2.0 * vertical_lift_Q(ya, p).to_vector() - 3.0 * vertical_lift_Q(yb, p).to_vector();
        CHECK(testing::max_abs(vertical_lift_Q(ys, p).to_vector() - v) <= 1e-12);
    }
}

TEST_CASE("lift identities against the Lagrangian contact form")
{
    testing::Rng rng(33);
    for (std::size_t n = 1; n <= 3; ++n) {
        const LagrangianSystem sys = LagrangianSystem::parse(testing::random_lagrangian(rng, n), n);
        const VectorFieldQ yq = random_q_field(rng, n);
        const VectorFieldQR y = random_qr_field(rng, n);
        const Observable yv_l = apply_field(vertical_lift_field(yq), sys.lagrangian());
        const Observable yc_l = apply_field(complete_lift_field(yq), sys.lagrangian());
        const Observable ybar_v_l = apply_field(vertical_lift_field(y), sys.lagrangian());
        const Observable z = z_component_observable(y);
        const auto ni = static_cast<Eigen::Index>(n);
        for (int k = 0; k < 100; ++k) {
            const Point x = rng.vector(static_cast<Eigen::Index>(2 * n + 1));
            const ContactFormJet form = sys.form_at(x);
            CHECK(std::abs(form.eta.dot(complete_lift_field(yq).value_at(x)) + yv_l.value_at(x)) <= 1e-12);
            CHECK(std::abs(form.eta.dot(complete_lift_field(y).value_at(x)) +
                           (ybar_v_l.value_at(x) - z.value_at(x))) <= 1e-12);

            // L_{Y^C} eta_L = -alpha_{Y^C(L)}, alpha_g = (dg/dqd^i) dq^i
            const Eigen::VectorXd lie = lie_derivative(form, complete_lift_field(yq).jet_at(x));
            Eigen::VectorXd alpha = Eigen::VectorXd::Zero(2 * ni + 1);
            alpha.head(ni) = yc_l.jet_at(x).gradient.segment(ni, ni);
            CHECK(testing::max_abs(lie + alpha) <= 1e-8);

            if (sys.is_regular(x)) {
                CHECK(std::abs(yv_l.jet_at(x).gradient.dot(sys.reeb_at(x))) <= 1e-9);
            }
        }
    }
}

TEST_CASE("apply_field gradient matches finite differences")
{
    testing::Rng rng(34);
    const std::size_t n = 2;
    const LagrangianSystem sys = LagrangianSystem::parse(testing::random_lagrangian(rng, n), n);
    const VectorFieldQR y = random_qr_field(rng, n);
    const Observable f = apply_field(complete_lift_field(y), sys.lagrangian());
    for (int k = 0; k < 20; ++k) {
        const Point x = rng.vector(5);
        const Jet1 j = f.jet_at(x);
        const Eigen::VectorXd fd = testing::fd_gradient([&](const Eigen::VectorXd& w) { return f.value_at(w); }, x);
        CHECK(testing::max_abs(j.gradient - fd) <= 1e-7);
        CHECK(std::abs(j.value - sys.lagrangian_jet(x).gradient().dot(complete_lift_field(y).value_at(x))) <= 1e-13);
    }
}
