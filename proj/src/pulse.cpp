#include "wqed/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wqed/errors.hpp"
#include "wqed/spectral.hpp"

namespace wqed::pulse {
namespace {

constexpr double kMaxLeakage = 1e-8;
const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

cd gaussian_time(const Gaussian& g, double t) {
    const double x = (t - g.t_c) / g.sigma_t;
    return kPiQuarter / std::sqrt(g.sigma_t) * std::exp(-0.5 * x * x);
}

cd gaussian_freq(const Gaussian& g, double w) {
    const double x = w * g.sigma_t;
    return std::sqrt(g.sigma_t) * kPiQuarter * std::exp(-0.5 * x * x) * std::polar(1.0, w * g.t_c);
}

bool same_grid(const SimGrid& a, const SimGrid& b) {
    return a.n_t == b.n_t && std::abs(a.dt - b.dt) <= 1e-12 * a.dt &&
           std::abs(a.t0 - b.t0) <= 1e-9 * a.dt;
}

// First and second moments of |f|^2 for a sampled envelope.
std::pair<double, double> moments(const Sampled& s) {
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double w = std::norm(s.values[k]) * s.grid.dt;
        const double t = s.grid.time(k);
        m1 += w * t;
        m2 += w * t * t;
    }
    return {m1, m2};
}

} // namespace

PulseSpec PulseSpec::gaussian(int photon_number, double t_c, double sigma_t) {
    if (photon_number < 0)
        throw InvalidArgument(fmt::format("photon number must be >= 0, got {}", photon_number));
    if (!(sigma_t > 0.0) || !std::isfinite(sigma_t) || !std::isfinite(t_c))
        throw InvalidArgument(fmt::format("invalid Gaussian (t_c={}, sigma_t={})", t_c, sigma_t));
    return PulseSpec(photon_number, Gaussian{t_c, sigma_t}, 1.0);
}

PulseSpec PulseSpec::sampled(int photon_number, const SimGrid& grid, std::vector<cd> values) {
    if (photon_number < 0)
        throw InvalidArgument(fmt::format("photon number must be >= 0, got {}", photon_number));
    grid.validate();
    if (values.size() != grid.n_t)
        throw GridMismatch(fmt::format("{} samples for a grid of {} points", values.size(), grid.n_t));
    double mass = 0.0;
    for (const cd& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw InvalidArgument("sampled envelope contains non-finite values");
        mass += std::norm(v);
    }
    mass *= grid.dt;
    if (!(mass > 0.0)) throw InvalidArgument("sampled envelope is identically zero");
    const double scale = 1.0 / std::sqrt(mass);
    for (cd& v : values) v *= scale;
    return PulseSpec(photon_number, Sampled{grid, std::move(values)}, scale);
}

PulseSpec PulseSpec::with_photons(int photon_number) const {
    if (photon_number < 0)
        throw InvalidArgument(fmt::format("photon number must be >= 0, got {}", photon_number));
    PulseSpec out = *this;
    out.photon_number_ = photon_number;
    return out;
}

double PulseSpec::width() const {
    if (const auto* g = std::get_if<Gaussian>(&shape_)) return g->sigma_t;
    const auto [m1, m2] = moments(std::get<Sampled>(shape_));
    // |f|^2 of a Gaussian has standard deviation sigma_t / sqrt(2)
    return std::sqrt(2.0 * std::max(0.0, m2 - m1 * m1));
}

double PulseSpec::centre() const {
    if (const auto* g = std::get_if<Gaussian>(&shape_)) return g->t_c;
    return moments(std::get<Sampled>(shape_)).first;
}

SimGrid default_grid(const PulseSpec& spec) {
    if (const auto* s = std::get_if<Sampled>(&spec.shape())) return s->grid;
    const auto& g = std::get<Gaussian>(spec.shape());
    const double t0 = std::min(0.0, g.t_c - 6.0 * g.sigma_t);
    const double t1 = std::max(12.0, g.t_c + 6.0 * g.sigma_t);
    return SimGrid::span(t0, t1, 0.02);
}

double mass_outside(const PulseSpec& spec, const SimGrid& grid) {
    const double lo = grid.t0 - 0.5 * grid.dt;
    const double hi = grid.t_end() + 0.5 * grid.dt;
    if (const auto* g = std::get_if<Gaussian>(&spec.shape())) {
        return 0.5 * std::erfc((g->t_c - lo) / g->sigma_t) +
               0.5 * std::erfc((hi - g->t_c) / g->sigma_t);
    }
    const auto& s = std::get<Sampled>(spec.shape());
    double out = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double t = s.grid.time(k);
        if (t < lo || t > hi) out += std::norm(s.values[k]) * s.grid.dt;
    }
    return out;
}

std::vector<cd> envelope_time(const PulseSpec& spec, const SimGrid& grid) {
    return envelope_time_shifted(spec, grid, 0.0);
}

std::vector<cd> envelope_time_shifted(const PulseSpec& spec, const SimGrid& grid, double shift) {
    grid.validate();
    if (const auto* g = std::get_if<Gaussian>(&spec.shape())) {
        const double leak = mass_outside(spec, grid);
        if (leak > kMaxLeakage)
            throw GridTooNarrow(fmt::format(
                "envelope mass {:.3e} lies outside [{}, {}] (limit {:.0e})", leak, grid.t0,
                grid.t_end(), kMaxLeakage));
        std::vector<cd> out(grid.n_t);
        for (std::size_t k = 0; k < grid.n_t; ++k) out[k] = gaussian_time(*g, grid.time(k) + shift);
        return out;
    }
    const auto& s = std::get<Sampled>(spec.shape());
    if (!same_grid(s.grid, grid))
        throw GridMismatch("sampled envelope was defined on a different grid");
    if (shift == 0.0) return s.values;
    const auto spectrum = spectral::frequency_from_time(s.values, grid.t0, grid.dt);
    return spectral::time_from_frequency(spectrum, grid.t0 + shift, grid.dt);
}

cd envelope_freq_at(const PulseSpec& spec, double omega) {
    if (const auto* g = std::get_if<Gaussian>(&spec.shape())) return gaussian_freq(*g, omega);
    const auto& s = std::get<Sampled>(spec.shape());
    cd acc = 0.0;
    for (std::size_t k = 0; k < s.values.size(); ++k)
        acc += s.values[k] * std::polar(1.0, omega * s.grid.time(k));
    return acc * s.grid.dt / std::sqrt(2.0 * std::numbers::pi);
}

std::vector<cd> envelope_freq(const PulseSpec& spec, const SimGrid& grid) {
    return envelope_freq_padded(spec, grid, grid.n_t);
}

std::vector<cd> envelope_freq_padded(const PulseSpec& spec, const SimGrid& grid, std::size_t m) {
    grid.validate();
    if (m < grid.n_t)
        throw InvalidArgument(fmt::format("padded length {} below grid size {}", m, grid.n_t));
    if (const auto* g = std::get_if<Gaussian>(&spec.shape())) {
        const double leak = mass_outside(spec, grid);
        if (leak > kMaxLeakage)
            throw GridTooNarrow(fmt::format("envelope mass {:.3e} lies outside the grid", leak));
        std::vector<cd> out(m);
        for (std::size_t j = 0; j < m; ++j) out[j] = gaussian_freq(*g, spectral::omega(j, m, grid.dt));
        return out;
    }
    const auto& s = std::get<Sampled>(spec.shape());
    if (!same_grid(s.grid, grid))
        throw GridMismatch("sampled envelope was defined on a different grid");
    std::vector<cd> padded(m, cd{0.0});
    std::copy(s.values.begin(), s.values.end(), padded.begin());
    return spectral::frequency_from_time(padded, grid.t0, grid.dt);
}

std::vector<double> pulse_flux(const PulseSpec& spec, const SimGrid& grid) {
    const auto f = envelope_time(spec, grid);
    std::vector<double> out(f.size());
    for (std::size_t k = 0; k < f.size(); ++k)
        out[k] = spec.photon_number() * std::norm(f[k]);
    return out;
}

} // namespace wqed::pulse
