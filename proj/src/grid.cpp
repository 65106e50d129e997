#include "wqed/grid.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed {

SimGrid SimGrid::span(double t0, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument(fmt::format("time step must be positive, got {}", dt));
    if (!(t_end > t0))
        throw InvalidArgument(fmt::format("empty time window [{}, {}]", t0, t_end));
    const double steps = std::round((t_end - t0) / dt);
    return {t0, dt, static_cast<std::size_t>(steps) + 1};
}

double SimGrid::domega() const {
    return 2.0 * std::numbers::pi / (static_cast<double>(n_t) * dt);
}

double SimGrid::omega(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(n_t / 2)) * domega();
}

void SimGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt) || !std::isfinite(t0))
        throw InvalidArgument(fmt::format("invalid grid (t0={}, dt={})", t0, dt));
    if (n_t < 2) throw InvalidArgument("grid needs at least two points");
}

std::size_t transform_friendly_size(std::size_t n) {
    if (n <= 1) return 1;
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        for (std::size_t p : {2u, 3u, 5u})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

} // namespace wqed
