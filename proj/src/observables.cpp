#include "wqed/observables.hpp"

#include "wqed/errors.hpp"

namespace wqed {

std::vector<double> cumulative_integral(const std::vector<double>& rate, double dt) {
    std::vector<double> out(rate.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 1; k < rate.size(); ++k) {
        acc += 0.5 * dt * (rate[k - 1] + rate[k]);
        out[k] = acc;
    }
    return out;
}

std::vector<double> population_from_fluxes(const std::vector<double>& n_pulse,
                                           const std::vector<double>& n_r,
                                           const std::vector<double>& n_l, double dt) {
    const std::size_t n = n_pulse.size();
    if (n_r.size() != n || (!n_l.empty() && n_l.size() != n))
        throw ShapeMismatch("flux series lengths differ");
    std::vector<double> net(n);
    for (std::size_t k = 0; k < n; ++k) net[k] = n_pulse[k] - n_r[k] - (n_l.empty() ? 0.0 : n_l[k]);
    return cumulative_integral(net, dt);
}

} // namespace wqed
