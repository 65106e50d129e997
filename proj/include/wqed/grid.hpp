// grid.hpp: Uniform time grid and its conjugate frequency grid

#pragma once

#include <cstddef>

namespace wqed {

// Uniform time grid t_k = t0 + k*dt, k = 0..n_t-1, with the conjugate
// frequency grid w_j = (j - n_t/2) * 2pi/(n_t*dt) (rotating frame, w=0 is
// the pulse carrier).
struct SimGrid {
    double t0{0.0};
    double dt{0.02};
    std::size_t n_t{601};

    // Grid covering [t0, t_end] inclusive; t_end is rounded to the nearest step.
    static SimGrid span(double t0, double t_end, double dt);

    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
    double t_end() const { return time(n_t - 1); }
    double domega() const;
    double omega(std::size_t j) const;

    // Same spacing, start moved by `offset`.
    SimGrid shifted(double offset) const { return {t0 + offset, dt, n_t}; }

    void validate() const;
};

// Smallest length >= n whose only prime factors are 2, 3 and 5.
std::size_t transform_friendly_size(std::size_t n);

} // namespace wqed
