#include "contact/sampling.hpp"

#include "contact/lagrangian.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace contact {

SamplePoints sample_points(std::size_t dimension, const SampleSpec& spec,
                           const std::function<bool(const Point&)>& accept)
{
    if (dimension == 0 || spec.count == 0 || !(spec.half_width > 0.0)) {
        throw std::invalid_argument("sample needs a positive dimension, count and box width");
    }
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coordinate(-spec.half_width, spec.half_width);
    SamplePoints out;
    out.reserve(spec.count);
    const std::size_t max_draws = 1000 * spec.count;
    for (std::size_t draw = 0; draw < max_draws && out.size() < spec.count; ++draw) {
        Point x(static_cast<Eigen::Index>(dimension));
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x(i) = coordinate(rng);
        }
        bool keep = true;
        if (accept) {
            try {
                keep = accept(x);
            } catch (const std::domain_error&) {
                keep = false;
            }
        }
        if (keep) {
            out.push_back(std::move(x));
        }
    }
    if (out.size() < spec.count) {
        throw std::runtime_error("could not find " + std::to_string(spec.count) + " admissible sample points");
    }
    return out;
}

SamplePoints sample_regular_points(const LagrangianSystem& sys, const SampleSpec& spec, double min_energy)
{
    return sample_points(sys.dimension(), spec, [&sys, min_energy](const Point& x) {
        const Jet2 l = sys.lagrangian_jet(x);
        if (!std::isfinite(l.value()) || !l.gradient().allFinite() || !l.hessian().allFinite()) {
            return false;
        }
        if (!sys.is_regular(x)) {
            return false;
        }
        const double e = sys.energy(x);
        return std::isfinite(e) && std::abs(e) >= min_energy && sys.acceleration(x).allFinite();
    });
}

SamplePoints sample_points(const ContactSystem& sys, const SampleSpec& spec)
{
    return sample_points(sys.dimension(), spec, [&sys](const Point& x) {
        const Jet1 h = sys.hamiltonian_at(x);
        return std::isfinite(h.value) && h.gradient.allFinite() && sys.hamiltonian_vf_at(x).allFinite();
    });
}

} // namespace contact
