#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "wqed/errors.hpp"
#include "wqed/pulse.hpp"
#include "wqed/spectral.hpp"

using namespace wqed;
using oracle::cd;
using oracle::pi;

namespace {

double sum_sq(const std::vector<cd>& v, double h) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s * h;
}

} // namespace

TEST_CASE("Gaussian envelope peaks at pi^(-1/4) for unit width") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto f = pulse::envelope_time(spec, grid);
    const auto k = static_cast<std::size_t>(std::llround((3.0 - grid.t0) / grid.dt));
    REQUIRE(grid.time(k) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(f[k] - cd{std::pow(pi, -0.25), 0.0}) < 1e-14);
    CHECK(f[k].real() == doctest::Approx(0.75113).epsilon(1e-5));
}

TEST_CASE("Gaussian envelope matches the closed form at every grid time") {
    for (double sigma : {0.5, 1.0, 2.5}) {
        const auto spec = pulse::PulseSpec::gaussian(1, 4.0, sigma);
        const auto grid = pulse::default_grid(spec);
        const auto f = pulse::envelope_time(spec, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.n_t; ++k)
            worst = std::max(worst, std::abs(f[k] - oracle::gaussian_time(grid.time(k), 4.0, sigma)));
        CHECK(worst < 1e-14);
    }
}

TEST_CASE("envelope normalization holds for every constructible pulse") {
    for (double sigma : {0.3, 0.5, 1.0, 2.0, 5.0})
        for (double tc : {0.0, 3.0, 10.0}) {
            const auto spec = pulse::PulseSpec::gaussian(2, tc, sigma);
            const auto grid = pulse::default_grid(spec);
            CHECK(std::abs(sum_sq(pulse::envelope_time(spec, grid), grid.dt) - 1.0) < 1e-10);
        }

    std::mt19937 gen(7);
    std::normal_distribution<double> nd;
    const SimGrid grid{0.0, 0.05, 200};
    std::vector<cd> raw(grid.n_t);
    for (auto& x : raw) x = {nd(gen), nd(gen)};
    const auto spec = pulse::PulseSpec::sampled(1, grid, raw);
    CHECK(std::abs(sum_sq(pulse::envelope_time(spec, grid), grid.dt) - 1.0) < 1e-8);
}

TEST_CASE("uniform sampled envelope renormalizes to 1/sqrt(m dt)") {
    const SimGrid grid{0.0, 0.1, 40};
    const auto spec = pulse::PulseSpec::sampled(1, grid, std::vector<cd>(grid.n_t, cd{3.0, 0.0}));
    const double expected = 1.0 / std::sqrt(40 * 0.1);
    for (const auto& v : pulse::envelope_time(spec, grid))
        CHECK(std::abs(v - cd{expected, 0.0}) < 1e-14);
}

TEST_CASE("frequency envelope at zero detuning is real and equal to pi^(-1/4)") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const cd f0 = pulse::envelope_freq_at(spec, 0.0);
    CHECK(std::abs(f0) == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-14));
    CHECK(std::abs(std::arg(f0)) < 1e-15);
}

TEST_CASE("frequency envelope equals the numerical transform of the time envelope") {
    for (double sigma : {0.5, 1.0, 5.0}) {
        const double tc = 3.0;
        const auto spec = pulse::PulseSpec::gaussian(1, tc, sigma);
        const auto grid = pulse::default_grid(spec);
        const auto F = pulse::envelope_freq(spec, grid);
        auto f = [&](double t) { return oracle::gaussian_time(t, tc, sigma); };
        const double peak = std::sqrt(sigma) * std::pow(pi, -0.25);
        double worst = 0.0;
        for (std::size_t j = 0; j < grid.n_t; j += 7) {
            const cd ref = oracle::fourier_midpoint(f, tc - 14 * sigma, tc + 14 * sigma,
                                                    std::min(sigma / 40.0, grid.dt / 2), grid.omega(j));
            worst = std::max(worst, std::abs(F[j] - ref) / peak);
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("frequency envelope has an even modulus and unit norm") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    for (double w : {0.1, 0.7, 1.9, 3.3})
        CHECK(std::abs(pulse::envelope_freq_at(spec, w)) ==
              doctest::Approx(std::abs(pulse::envelope_freq_at(spec, -w))).epsilon(1e-15));

    const auto grid = pulse::default_grid(spec);
    const std::size_t m = transform_friendly_size(3 * grid.n_t);
    const auto F = pulse::envelope_freq_padded(spec, grid, m);
    CHECK(std::abs(sum_sq(F, spectral::domega(m, grid.dt)) - 1.0) < 1e-8);
}

TEST_CASE("inverse transform of the frequency envelope returns the time envelope") {
    for (double sigma : {0.5, 1.0, 5.0}) {
        const auto spec = pulse::PulseSpec::gaussian(1, 3.0, sigma);
        const auto grid = pulse::default_grid(spec);
        const std::size_t m = transform_friendly_size(3 * grid.n_t);
        const auto back = spectral::time_from_frequency(pulse::envelope_freq_padded(spec, grid, m),
                                                        grid.t0, grid.dt);
        const auto f = pulse::envelope_time(spec, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.n_t; ++k) worst = std::max(worst, std::abs(back[k] - f[k]));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("time and frequency grids are exactly conjugate") {
    std::mt19937 gen(11);
    std::normal_distribution<double> nd;
    for (std::size_t n : {30, 64, 125, 751}) {
        std::vector<cd> x(n);
        for (auto& v : x) v = {nd(gen), nd(gen)};
        const auto X = spectral::frequency_from_time(x, -1.3, 0.05);
        const auto y = spectral::time_from_frequency(X, -1.3, 0.05);
        double worst = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(y[k] - x[k]));
            scale = std::max(scale, std::abs(x[k]));
        }
        CHECK(worst / scale < 1e-10);
    }
}

TEST_CASE("fast transform agrees with a direct discrete sum") {
    std::mt19937 gen(3);
    std::normal_distribution<double> nd;
    const std::size_t m = 90;
    const double dt = 0.1, t0 = -2.0;
    std::vector<cd> F(m);
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) {
        F[j] = {nd(gen), nd(gen)};
        w[j] = spectral::omega(j, m, dt);
    }
    const auto f = spectral::time_from_frequency(F, t0, dt);
    for (std::size_t k = 0; k < m; k += 9)
        CHECK(std::abs(f[k] - oracle::inverse_direct(w, F, t0 + static_cast<double>(k) * dt)) < 1e-12);
}

TEST_CASE("frequency axis has spacing 2 pi / (n dt) and is centred on zero") {
    const SimGrid grid{0.0, 0.02, 600};
    CHECK(grid.domega() == doctest::Approx(2 * pi / (600 * 0.02)).epsilon(1e-15));
    CHECK(std::abs(grid.omega(300)) < 1e-15);
    CHECK(grid.omega(301) - grid.omega(300) == doctest::Approx(grid.domega()).epsilon(1e-12));
}

TEST_CASE("pulse flux of one photon peaks at 1/sqrt(pi)") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto n = pulse::pulse_flux(spec, grid);
    const auto k = static_cast<std::size_t>(std::llround((3.0 - grid.t0) / grid.dt));
    CHECK(n[k] == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-12));
    CHECK(n[k] == doctest::Approx(0.56419).epsilon(1e-5));
}

TEST_CASE("two-photon product pulse flux is twice the one-photon flux") {
    const auto spec = pulse::PulseSpec::gaussian(2, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto n2 = pulse::pulse_flux(spec, grid);
    const auto f = pulse::envelope_time(spec, grid);

    // Flux of the product envelope from its joint spectral amplitude:
    // n(t) = 2 int dk |f(k, t)|^2 with f(k, t) the partial transform over one
    // argument, which factorizes as f(k) f(t) and reduces to 2 |f(t)|^2 by
    // the unit norm of f(k); check the factorized integral numerically.
    double int_k = 0.0;
    const double dk = 0.01;
    for (double k = -12.0; k < 12.0; k += dk) int_k += std::norm(pulse::envelope_freq_at(spec, k)) * dk;
    for (std::size_t j = 0; j < grid.n_t; j += 25)
        CHECK(n2[j] == doctest::Approx(2.0 * int_k * std::norm(f[j])).epsilon(1e-10));
}

TEST_CASE("pulse flux integrates to the photon number") {
    for (int N = 1; N <= 8; ++N) {
        const auto spec = pulse::PulseSpec::gaussian(N, 3.0, 1.0);
        const auto grid = pulse::default_grid(spec);
        double total = 0.0;
        for (double v : pulse::pulse_flux(spec, grid)) total += v * grid.dt;
        CHECK(std::abs(total - N) < 1e-8);
    }
}

TEST_CASE("Gaussian pair saturates the time-frequency uncertainty bound") {
    for (double sigma : {0.5, 1.0, 2.0}) {
        const auto spec = pulse::PulseSpec::gaussian(1, 3.0, sigma);
        const auto grid = pulse::default_grid(spec);
        const auto f = pulse::envelope_time(spec, grid);
        double m0 = 0, m1 = 0, m2 = 0;
        for (std::size_t k = 0; k < grid.n_t; ++k) {
            const double p = std::norm(f[k]), t = grid.time(k);
            m0 += p; m1 += p * t; m2 += p * t * t;
        }
        const double var_t = m2 / m0 - (m1 / m0) * (m1 / m0);

        const std::size_t m = transform_friendly_size(3 * grid.n_t);
        const auto F = pulse::envelope_freq_padded(spec, grid, m);
        double w0 = 0, w1 = 0, w2 = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double p = std::norm(F[j]), w = spectral::omega(j, m, grid.dt);
            w0 += p; w1 += p * w; w2 += p * w * w;
        }
        const double var_w = w2 / w0 - (w1 / w0) * (w1 / w0);
        CHECK(std::abs(std::sqrt(var_t * var_w) - 0.5) < 1e-6);
    }
}

TEST_CASE("default grid covers six widths either side of the pulse centre") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    CHECK(grid.t0 == doctest::Approx(-3.0));
    CHECK(grid.t_end() == doctest::Approx(12.0));
    CHECK(grid.n_t == 751);
    CHECK(pulse::mass_outside(spec, grid) < 1e-8);
}

TEST_CASE("narrow grid and invalid pulses are rejected") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    CHECK_THROWS_AS(pulse::envelope_time(spec, SimGrid::span(2.0, 4.0, 0.02)), GridTooNarrow);
    CHECK_THROWS_AS(pulse::PulseSpec::gaussian(1, 3.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(pulse::PulseSpec::gaussian(-1, 3.0, 1.0), InvalidArgument);
    const SimGrid g{0.0, 0.1, 10};
    CHECK_THROWS_AS(pulse::PulseSpec::sampled(1, g, std::vector<cd>(10, 0.0)), InvalidArgument);
    CHECK_THROWS_AS(pulse::PulseSpec::sampled(1, g, std::vector<cd>(9, 1.0)), GridMismatch);
}
