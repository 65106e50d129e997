#include <doctest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "wqed/errors.hpp"
#include "wqed/pulse.hpp"
#include "wqed/scatter1.hpp"
#include "wqed/timebin.hpp"

using namespace wqed;
using oracle::cd;
using oracle::I;

namespace {

// Closed forms re-derived here by hand so the library is checked against
// independent arithmetic rather than against itself.
cd chi_ref(double w, double gamma, double delta) {
    return (w - delta - I * gamma / 2.0) / (w - delta + I * gamma / 2.0);
}
cd r_ref(double w, double gamma) { return -gamma / (gamma - 2.0 * I * w); }

double flux_integral(const std::vector<cd>& phi, double dt) {
    double s = 0.0;
    for (const auto& v : phi) s += std::norm(v) * dt;
    return s;
}

} // namespace

TEST_CASE("chiral transmission is a pure phase that flips sign on resonance") {
    for (double gamma : {0.3, 1.0, 2.0})
        for (double delta : {-1.0, 0.0, 0.7}) {
            const auto p = SystemParams::chiral(gamma, delta);
            CHECK(std::abs(scatter::coeff_chiral(delta, p) - cd{-1.0, 0.0}) < 1e-15);
            for (double w : {-5.0, -0.4, 0.0, 0.2, 3.0}) {
                CHECK(std::abs(std::abs(scatter::coeff_chiral(w, p)) - 1.0) < 1e-12);
                CHECK(std::abs(scatter::coeff_chiral(w, p) - chi_ref(w, gamma, delta)) < 1e-15);
            }
            CHECK(std::abs(scatter::coeff_chiral(1e8, p) - 1.0) < 1e-7);
            CHECK(std::abs(scatter::coeff_chiral(-1e8, p) - 1.0) < 1e-7);
        }
}

TEST_CASE("chiral transmission at half a linewidth is -i") {
    const auto p = SystemParams::chiral(1.0, 0.0);
    CHECK(std::abs(scatter::coeff_chiral(0.5, p) - cd{0.0, -1.0}) < 1e-15);
}

TEST_CASE("symmetric coefficients on resonance give perfect reflection") {
    const auto c = scatter::coeff_symmetric(0.0, SystemParams::symmetric());
    CHECK(c.r == cd{-1.0, 0.0});
    CHECK(c.t == cd{0.0, 0.0});
}

TEST_CASE("symmetric coefficients half a linewidth off resonance") {
    const auto c = scatter::coeff_symmetric(0.5, SystemParams::symmetric());
    CHECK(std::abs(c.r - cd{-0.5, -0.5}) < 1e-15);
    CHECK(std::abs(c.t - cd{0.5, -0.5}) < 1e-15);
    CHECK(std::abs(c.r - r_ref(0.5, 1.0)) < 1e-15);
}

TEST_CASE("coefficients over the grid conserve single-photon flux") {
    const SimGrid grid{-3.0, 0.02, 751};
    const auto sym = scatter::coefficients(SystemParams::symmetric(), grid);
    REQUIRE(sym.r_sym.size() == grid.n_t);
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.n_t; ++j) {
        worst = std::max(worst, std::abs(std::norm(sym.t_sym[j]) + std::norm(sym.r_sym[j]) - 1.0));
        CHECK(sym.t_sym[j] == 1.0 + sym.r_sym[j]);
    }
    CHECK(worst < 1e-12);

    const auto ch = scatter::coefficients(SystemParams::chiral(1.0, 0.4), grid);
    worst = 0.0;
    for (const auto& t : ch.t_ch) worst = std::max(worst, std::abs(std::abs(t) - 1.0));
    CHECK(worst < 1e-12);
}

TEST_CASE("symmetric engine refuses detuning and unsupported couplings") {
    auto p = SystemParams::symmetric();
    p.delta = 0.3;
    CHECK_THROWS_AS(scatter::coeff_symmetric(0.1, p), UnsupportedDetuning);
    CHECK_THROWS_AS(scatter::coeff_chiral(0.1, SystemParams::symmetric()), InvalidParams);
    SystemParams lopsided{0.7, 0.3, 0.0, Coupling::Symmetric};
    CHECK_THROWS_AS(lopsided.validate(), InvalidParams);
    SystemParams leaky{1.0, 0.2, 0.0, Coupling::ChiralRight};
    CHECK_THROWS_AS(leaky.validate(), InvalidParams);
}

TEST_CASE("decoupled emitter leaves the pulse unchanged") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto f = pulse::envelope_time(spec, grid);
    for (auto p : {SystemParams::chiral(1e-14), SystemParams::symmetric(1e-14)}) {
        const auto out = scatter::project_out_1ph(spec, p, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.n_t; ++k) worst = std::max(worst, std::abs(out.right[k] - f[k]));
        CHECK(worst < 1e-10);
        if (!out.left.empty()) {
            double left = 0.0;
            for (const auto& v : out.left) left = std::max(left, std::abs(v));
            CHECK(left < 1e-10);
        }
    }
}

TEST_CASE("one-photon output is unitary for every envelope and coupling") {
    for (double sigma : {0.5, 1.0, 5.0})
        for (auto p : {SystemParams::chiral(), SystemParams::chiral(1.0, 0.8), SystemParams::symmetric()}) {
            const auto spec = pulse::PulseSpec::gaussian(1, 3.0, sigma);
            const auto grid = pulse::default_grid(spec);
            const auto out = scatter::project_out_1ph(spec, p, grid);
            CHECK(std::abs(out.norm - 1.0) < 1e-6);
            // Inside the output window only the emitter's exponential tail past
            // the last grid time may be missing.
            double window = flux_integral(out.right, grid.dt);
            if (p.mode == Coupling::ChiralRight) CHECK(out.left.empty());
            else window += flux_integral(out.left, grid.dt);
            CHECK(window <= 1.0 + 1e-6);
            CHECK(window > 1.0 - 1e-3);
        }
}

TEST_CASE("projected wavefunction matches a direct frequency integral") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto sym = scatter::project_out_1ph(spec, SystemParams::symmetric(), grid);
    const auto chi = scatter::project_out_1ph(spec, SystemParams::chiral(1.0, 0.3), grid);
    const double pi = oracle::pi;
    auto f_w = [](double w) {
        return std::pow(oracle::pi, -0.25) * std::exp(-0.5 * w * w) * std::exp(I * w * 3.0);
    };
    for (std::size_t k = 0; k < grid.n_t; k += 50) {
        const double t = grid.time(k);
        cd right = 0.0, left = 0.0, chiral = 0.0;
        const double h = 0.005;
        for (double w = -15.0 + h / 2; w < 15.0; w += h) {
            const cd e = f_w(w) * std::exp(-I * w * t);
            left += e * r_ref(w, 1.0);
            right += e * (1.0 + r_ref(w, 1.0));
            chiral += e * chi_ref(w, 1.0, 0.3);
        }
        const double s = h / std::sqrt(2 * pi);
        CHECK(std::abs(sym.right[k] - right * s) < 1e-7);
        CHECK(std::abs(sym.left[k] - left * s) < 1e-7);
        CHECK(std::abs(chi.right[k] - chiral * s) < 1e-7);
    }
}

TEST_CASE("one-photon G1 is exactly the outer product of the output wavefunction") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto out = scatter::project_out_1ph(spec, SystemParams::symmetric(), grid);
    const auto maps = scatter::g1_one_photon(out);
    REQUIRE(maps.size() == 4);
    for (const auto& [pair, map] : maps) {
        const auto& a = pair.first == Channel::R ? out.right : out.left;
        const auto& b = pair.second == Channel::R ? out.right : out.left;
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.n_t; i += 3)
            for (std::size_t j = 0; j < grid.n_t; j += 3)
                worst = std::max(worst, std::abs(map.values(static_cast<Eigen::Index>(i),
                                                            static_cast<Eigen::Index>(j)) -
                                                 std::conj(a[i]) * b[j]));
        CHECK(worst < 1e-15);
    }
}

TEST_CASE("one-photon G1 is Hermitian with a non-negative diagonal") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto maps = scatter::g1_one_photon(spec, SystemParams::symmetric(), grid);
    const auto& rr = maps.at({Channel::R, Channel::R}).values;
    const auto& rl = maps.at({Channel::R, Channel::L}).values;
    const auto& lr = maps.at({Channel::L, Channel::R}).values;
    CHECK((rr - rr.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((rl - lr.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    for (Eigen::Index k = 0; k < rr.rows(); ++k) {
        CHECK(rr(k, k).real() >= 0.0);
        CHECK(rr(k, k).imag() == 0.0);
    }
}

TEST_CASE("symmetric transmitted G1 has a dark band near gamma t = 4") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto out = scatter::project_out_1ph(spec, SystemParams::symmetric(), grid);
    double peak = 0.0;
    for (const auto& v : out.right) peak = std::max(peak, std::norm(v));
    std::size_t dark = 0;
    double lowest = 1e300;
    for (std::size_t k = 0; k < grid.n_t; ++k) {
        const double t = grid.time(k);
        if (t < 2.5 || t > 5.5) continue;
        if (std::norm(out.right[k]) < lowest) {
            lowest = std::norm(out.right[k]);
            dark = k;
        }
    }
    MESSAGE("transmitted flux minimum at t = " << grid.time(dark) << ", relative "
                                              << lowest / peak);
    CHECK(grid.time(dark) == doctest::Approx(4.0).epsilon(0.1));
    CHECK(lowest / peak < 1e-3);
}

TEST_CASE("one-photon channel shares agree with the time-bin integrated fluxes") {
    const auto spec = pulse::PulseSpec::gaussian(1, 3.0, 1.0);
    const auto grid = pulse::default_grid(spec);
    const auto params = SystemParams::symmetric();
    const auto out = scatter::project_out_1ph(spec, params, grid);
    const double share_r = flux_integral(out.right, grid.dt);
    const double share_l = flux_integral(out.left, grid.dt);

    auto state = timebin::build_fock_mps(spec, grid, 1, params.mode);
    timebin::EvolutionConfig cfg{params, grid, {}, 0, 1e-3, 1};
    const auto res = timebin::evolve(std::move(state), cfg);
    double n_r = 0.0, n_l = 0.0;
    for (const auto& s : res.trajectory.steps) {
        n_r += s.n_r * grid.dt;
        n_l += s.n_l * grid.dt;
    }
    CHECK(std::abs(n_r - share_r) / share_r < 0.02);
    CHECK(std::abs(n_l - share_l) / share_l < 0.02);
}
