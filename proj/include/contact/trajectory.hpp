#pragma once

#include "contact/fields.hpp"

#include <map>
#include <string>
#include <vector>

namespace contact {

/// Uniformly sampled integral curve: times[k] = k * step, one chart state per node,
/// plus named monitor series sampled at the same nodes.
struct Trajectory
{
    double step = 0.0;
    std::vector<double> times;
    std::vector<Point> states;
    std::map<std::string, std::vector<double>> monitors;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
};

} // namespace contact
