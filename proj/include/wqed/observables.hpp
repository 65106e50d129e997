// observables.hpp: Population/flux time series shared by both engines

#pragma once

#include <vector>

#include "wqed/grid.hpp"

namespace wqed {

// All series are sampled on `grid` times. Fluxes in units of gamma,
// populations dimensionless.
struct PopulationSeries {
    SimGrid grid;
    std::vector<double> n_tls;
    std::vector<double> n_r;
    std::vector<double> n_l;
    std::vector<double> n_pulse;
    std::vector<double> trunc_err; // cumulative truncation error (zero for scattering)
};

// Cumulative trapezoid integral of `rate` on a uniform grid, starting at 0.
std::vector<double> cumulative_integral(const std::vector<double>& rate, double dt);

// n_TLS(t) = int^t n_pulse - N_R(t) - N_L(t), trapezoid rule.
std::vector<double> population_from_fluxes(const std::vector<double>& n_pulse,
                                           const std::vector<double>& n_r,
                                           const std::vector<double>& n_l, double dt);

} // namespace wqed
