// pulse.hpp: Fock-pulse envelopes in time and frequency, and pulse flux

#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "wqed/grid.hpp"

namespace wqed::pulse {

using cd = std::complex<double>;

struct Gaussian {
    double t_c{3.0};
    double sigma_t{1.0};
};

// Envelope samples f(t_k) on a specific grid; renormalized on construction.
struct Sampled {
    SimGrid grid;
    std::vector<cd> values;
};

// An N-photon Fock pulse with identical photons sharing the envelope f.
// Multi-photon joint envelopes are the symmetric product f(w1)f(w2)...
class PulseSpec {
public:
    static PulseSpec gaussian(int photon_number, double t_c, double sigma_t);
    // Rescales `values` so that sum |f|^2 dt = 1; `normalization()` keeps the factor applied.
    static PulseSpec sampled(int photon_number, const SimGrid& grid, std::vector<cd> values);

    int photon_number() const { return photon_number_; }
    const std::variant<Gaussian, Sampled>& shape() const { return shape_; }
    bool is_gaussian() const { return std::holds_alternative<Gaussian>(shape_); }
    double normalization() const { return normalization_; }

    // Copy with a different photon number, same envelope.
    PulseSpec with_photons(int photon_number) const;

    // Characteristic time scale: sigma_t for Gaussians, rms width of |f|^2 otherwise.
    double width() const;
    // Centre of |f|^2.
    double centre() const;

private:
    PulseSpec(int n, std::variant<Gaussian, Sampled> shape, double norm)
        : photon_number_(n), shape_(std::move(shape)), normalization_(norm) {}

    int photon_number_{1};
    std::variant<Gaussian, Sampled> shape_;
    double normalization_{1.0};
};

// Default grid: [min(0, t_c - 6 sigma), max(12, t_c + 6 sigma)] at dt = 0.02 (units of 1/gamma).
SimGrid default_grid(const PulseSpec& spec);

// Probability mass of |f(t)|^2 outside the grid's bin coverage [t0 - dt/2, t_end + dt/2].
double mass_outside(const PulseSpec& spec, const SimGrid& grid);

// f(t_k) for every grid time. Throws GridTooNarrow when mass_outside > 1e-8,
// GridMismatch when a sampled envelope lives on a different grid.
std::vector<cd> envelope_time(const PulseSpec& spec, const SimGrid& grid);

// f(t_k + shift); band-limited interpolation for sampled envelopes.
std::vector<cd> envelope_time_shifted(const PulseSpec& spec, const SimGrid& grid, double shift);

// f(w) at arbitrary frequency. Gaussian: analytic, sqrt(sigma) pi^{-1/4}
// exp(-w^2 sigma^2 / 2) exp(+i w t_c). Sampled: direct transform of the samples.
cd envelope_freq_at(const PulseSpec& spec, double omega);

// f(w_j) on the grid's conjugate frequency axis.
std::vector<cd> envelope_freq(const PulseSpec& spec, const SimGrid& grid);

// f(w_j) on a zero-padded axis of length m sharing the grid's dt.
std::vector<cd> envelope_freq_padded(const PulseSpec& spec, const SimGrid& grid, std::size_t m);

// Incident photon flux n_pulse(t_k) = N |f(t_k)|^2.
std::vector<double> pulse_flux(const PulseSpec& spec, const SimGrid& grid);

} // namespace wqed::pulse
