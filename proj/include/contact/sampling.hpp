#pragma once

// Deterministic point samples in a box around the origin of a chart.

#include "contact/fields.hpp"

#include <cstdint>
#include <functional>

namespace contact {

class LagrangianSystem;
class ContactSystem;

struct SampleSpec
{
    std::size_t count = 100;
    double half_width = 1.0;      // box [-w, w]^dim
    std::uint64_t seed = 20240601;
};

/// Uniform points in the box, drawn from mt19937_64(seed), keeping those `accept` admits.
/// A point is also dropped if `accept` throws std::domain_error. Gives up with
/// std::runtime_error after 1000 * count draws.
SamplePoints sample_points(std::size_t dimension, const SampleSpec& spec,
                           const std::function<bool(const Point&)>& accept = {});

/// Points where L and E_L are finite, W is regular and |E_L| >= min_energy.
SamplePoints sample_regular_points(const LagrangianSystem& sys, const SampleSpec& spec, double min_energy = 0.0);

/// Points where H and X_H are finite.
SamplePoints sample_points(const ContactSystem& sys, const SampleSpec& spec);

} // namespace contact
