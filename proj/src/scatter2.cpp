#include "wqed/scatter2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "wqed/errors.hpp"
#include "wqed/spectral.hpp"

namespace wqed::scatter {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNormTolerance = 1e-4;
constexpr double kPopulationSlack = 1e-3;

cd r_sym(double w, double gamma) { return -gamma / cd(gamma, -2.0 * w); }

std::vector<ChannelPair> pairs_for(Coupling mode) {
    if (mode == Coupling::ChiralRight) return {{Channel::R, Channel::R}};
    return {{Channel::R, Channel::R},
            {Channel::R, Channel::L},
            {Channel::L, Channel::R},
            {Channel::L, Channel::L}};
}

// Samples f at arbitrary frequencies; cheap for Gaussians, a direct sum otherwise.
std::vector<cd> envelope_at(const pulse::PulseSpec& spec, const Axis& axis) {
    std::vector<cd> out(axis.size);
    for (std::size_t i = 0; i < axis.size; ++i) out[i] = pulse::envelope_freq_at(spec, axis.at(i));
    return out;
}

// Single-photon factor k(nu) that appears twice inside the bound-state kernel.
cd inner_factor(double nu, const SystemParams& params) {
    return params.mode == Coupling::Symmetric ? r_sym(nu, params.gamma()) : s_function(nu, params);
}

// K(w') = int dD f(w'-D) f(w'+D) k(w'-D) k(w'+D) at w'_n = c + n * step/2,
// n = 0..count-1, by the trapezoid rule with step h = step/n_sub on [-range, range].
// Every nu = w' +- D lies on a lattice of spacing step/(2 n_sub), so f*k is
// tabulated once.
std::vector<cd> pair_energy_integral(const pulse::PulseSpec& spec, const SystemParams& params,
                                     double c, double step, std::size_t count, double range,
                                     std::size_t n_sub) {
    const double h = step / static_cast<double>(n_sub);
    const double delta = 0.5 * h;
    const auto b_max = static_cast<long>(std::ceil(range / h));
    const long q_min = -2 * b_max;
    const long q_max = static_cast<long>((count - 1) * n_sub) + 2 * b_max;
    std::vector<cd> fk(static_cast<std::size_t>(q_max - q_min + 1));
    for (long q = q_min; q <= q_max; ++q) {
        const double nu = c + static_cast<double>(q) * delta;
        fk[static_cast<std::size_t>(q - q_min)] =
            pulse::envelope_freq_at(spec, nu) * inner_factor(nu, params);
    }
    std::vector<cd> out(count);
    for (std::size_t n = 0; n < count; ++n) {
        const long centre = static_cast<long>(n * n_sub) - q_min;
        cd acc = fk[static_cast<std::size_t>(centre)] * fk[static_cast<std::size_t>(centre)];
        cd tail = 0.0;
        for (long b = 1; b <= b_max; ++b) {
            const cd term = fk[static_cast<std::size_t>(centre - 2 * b)] *
                            fk[static_cast<std::size_t>(centre + 2 * b)];
            tail += b == b_max ? 0.5 * term : term;
        }
        out[n] = h * (acc + 2.0 * tail);
    }
    return out;
}

std::size_t subdivisions(double step, double max_step) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(step / max_step - 1e-9)));
}

// Converged pair-energy integral, or QuadratureNotConverged.
std::vector<cd> converged_pair_integral(const pulse::PulseSpec& spec, const SystemParams& params,
                                        double c, double step, std::size_t count,
                                        const QuadratureOptions& opts) {
    const double g = params.gamma();
    const double range = std::max(opts.min_range * g, opts.width_factor / spec.width());
    const std::size_t n_sub = subdivisions(step, opts.max_step * g);
    auto k = pair_energy_integral(spec, params, c, step, count, range, n_sub);
    if (!opts.check_convergence) return k;
    const auto ref = pair_energy_integral(spec, params, c, step, count, 2.0 * range, 2 * n_sub);
    double scale = 0.0, diff = 0.0;
    for (std::size_t n = 0; n < count; ++n) {
        scale = std::max(scale, std::abs(ref[n]));
        diff = std::max(diff, std::abs(ref[n] - k[n]));
    }
    if (scale > 0.0 && diff > opts.tolerance * scale)
        throw QuadratureNotConverged(fmt::format(
            "relative change {:.3e} when doubling range {} and halving step {} (tolerance {:.0e})",
            diff / scale, range, step / static_cast<double>(n_sub), opts.tolerance));
    return k;
}

Axis frequency_axis(const SimGrid& grid, const std::string& label) {
    return {label, grid.omega(0), grid.domega(), grid.n_t};
}

void require_two_photons(const pulse::PulseSpec& spec) {
    if (spec.photon_number() != 2)
        throw InvalidArgument(fmt::format("two-photon engine needs N = 2, got {}",
                                          spec.photon_number()));
}

} // namespace

cd s_function(double omega, const SystemParams& params) {
    return std::sqrt(params.gamma()) / cd(omega - params.delta, 0.5 * params.gamma());
}

cd kernel_T_sym(double nu1, double nu2, double w1, double w2, const SystemParams& params) {
    const double g = params.gamma();
    return 4.0 / (kPi * g) * r_sym(nu1, g) * r_sym(nu2, g) * r_sym(w1, g) * r_sym(w2, g) /
           r_sym(0.5 * (w1 + w2), g);
}

cd kernel_T_ch(double nu1, double nu2, double w1, double w2, const SystemParams& params) {
    const cd i(0.0, 1.0);
    return i * std::sqrt(params.gamma()) / kPi * s_function(nu1, params) *
           s_function(nu2, params) * (s_function(w1, params) + s_function(w2, params));
}

PairMaps i_lin(const pulse::PulseSpec& spec, const SystemParams& params, const Axis& w1,
               const Axis& w2) {
    require_scatter_supported(params);
    const auto f1 = envelope_at(spec, w1);
    const auto f2 = envelope_at(spec, w2);
    PairMaps maps;
    for (const ChannelPair p : pairs_for(params.mode)) {
        Eigen::VectorXcd a(w1.size), b(w2.size);
        for (std::size_t i = 0; i < w1.size; ++i)
            a[static_cast<Eigen::Index>(i)] = f1[i] * channel_coeff(p.first, w1.at(i), params);
        for (std::size_t j = 0; j < w2.size; ++j)
            b[static_cast<Eigen::Index>(j)] = f2[j] * channel_coeff(p.second, w2.at(j), params);
        maps.emplace(p, ComplexMap2D(w1, w2, a * b.transpose()));
    }
    return maps;
}

PairMaps i_lin(const pulse::PulseSpec& spec, const SystemParams& params, const SimGrid& grid) {
    return i_lin(spec, params, frequency_axis(grid, "omega1"), frequency_axis(grid, "omega2"));
}

ComplexMap2D i_nlin(const pulse::PulseSpec& spec, const SystemParams& params, const Axis& w1,
                    const Axis& w2, const QuadratureOptions& opts) {
    require_scatter_supported(params);
    if (std::abs(w1.step - w2.step) > 1e-12 * std::abs(w1.step))
        throw InvalidArgument("nonlinear map needs equal steps on both frequency axes");
    ComplexMap2D map(w1, w2);
    const double g = params.gamma();
    if (g < kDecoupledGamma || w1.size == 0 || w2.size == 0) return map;

    const double c = 0.5 * (w1.start + w2.start);
    const double step = w1.step;
    const std::size_t count = w1.size + w2.size - 1;
    const auto k = converged_pair_integral(spec, params, c, step, count, opts);

    if (params.mode == Coupling::Symmetric) {
        const double pref = 2.0 / (kPi * g);
        for (std::size_t j = 0; j < w2.size; ++j) {
            const cd r2 = r_sym(w2.at(j), g);
            for (std::size_t i = 0; i < w1.size; ++i) {
                const double wp = c + 0.5 * step * static_cast<double>(i + j);
                map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    pref * r_sym(w1.at(i), g) * r2 / r_sym(wp, g) * k[i + j];
            }
        }
    } else {
        const cd pref = cd(0.0, 1.0) * std::sqrt(g) / (2.0 * kPi);
        std::vector<cd> s1(w1.size), s2(w2.size);
        for (std::size_t i = 0; i < w1.size; ++i) s1[i] = s_function(w1.at(i), params);
        for (std::size_t j = 0; j < w2.size; ++j) s2[j] = s_function(w2.at(j), params);
        for (std::size_t j = 0; j < w2.size; ++j)
            for (std::size_t i = 0; i < w1.size; ++i)
                map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    pref * (s1[i] + s2[j]) * k[i + j];
    }
    return map;
}

ComplexMap2D i_nlin(const pulse::PulseSpec& spec, const SystemParams& params,
                    const SimGrid& grid, const QuadratureOptions& opts) {
    return i_nlin(spec, params, frequency_axis(grid, "omega1"), frequency_axis(grid, "omega2"),
                  opts);
}

TwoPhotonSolution TwoPhotonSolution::compute(const pulse::PulseSpec& spec,
                                             const SystemParams& params, const SimGrid& grid,
                                             std::size_t pad_factor,
                                             const QuadratureOptions& opts) {
    require_scatter_supported(params);
    require_two_photons(spec);
    grid.validate();

    TwoPhotonSolution sol;
    sol.grid_ = grid;
    sol.mode_ = params.mode;
    const std::size_t m = transform_friendly_size(std::max<std::size_t>(1, pad_factor) * grid.n_t);
    const auto mi = static_cast<Eigen::Index>(m);
    const auto nt = static_cast<Eigen::Index>(grid.n_t);
    const Axis axis{"omega", spectral::omega(0, m, grid.dt), spectral::domega(m, grid.dt), m};

    const auto f = pulse::envelope_freq_padded(spec, grid, m);
    const ComplexMap2D nonlinear = i_nlin(spec, params, axis, axis, opts);

    double raw = 0.0;
    const double cell = grid.dt * grid.dt;
    for (const ChannelPair p : pairs_for(params.mode)) {
        if (p == ChannelPair{Channel::L, Channel::R}) continue; // transpose of RL
        Eigen::VectorXcd a(mi), b(mi);
        for (std::size_t j = 0; j < m; ++j) {
            const double w = axis.at(j);
            a[static_cast<Eigen::Index>(j)] = f[j] * channel_coeff(p.first, w, params);
            b[static_cast<Eigen::Index>(j)] = f[j] * channel_coeff(p.second, w, params);
        }
        Eigen::MatrixXcd psi = a * b.transpose() + nonlinear.values;
        spectral::time_from_frequency_2d(psi, grid.t0, grid.dt);
        const double weight = p.first == p.second ? 1.0 : 2.0;
        raw += weight * psi.squaredNorm() * cell;
        sol.rows_[p] = psi.topRows(nt);
        if (p == ChannelPair{Channel::R, Channel::L})
            sol.rows_[{Channel::L, Channel::R}] = psi.leftCols(nt).transpose();
    }

    sol.raw_norm_ = raw;
    if (!(std::abs(raw - 1.0) <= kNormTolerance))
        throw NormalizationDrift(fmt::format(
            "two-photon output norm {:.8f} deviates from 1 by more than {:.0e}", raw,
            kNormTolerance));
    sol.fitted_constant_ = 1.0 / std::sqrt(raw);
    for (auto& [pair, rows] : sol.rows_) rows *= sol.fitted_constant_;
    return sol;
}

std::vector<ChannelPair> TwoPhotonSolution::pairs() const { return pairs_for(mode_); }

ComplexMap2D TwoPhotonSolution::phi2(ChannelPair pair) const {
    const auto it = rows_.find(pair);
    if (it == rows_.end())
        throw InvalidArgument("channel pair " + to_string(pair) + " not present for this coupling");
    const auto nt = static_cast<Eigen::Index>(grid_.n_t);
    return ComplexMap2D(time_axis(grid_, "t"), time_axis(grid_, "t'"),
                        std::sqrt(2.0) * it->second.leftCols(nt));
}

ComplexMap2D TwoPhotonSolution::g2(ChannelPair pair) const {
    ComplexMap2D map = phi2(pair);
    map.values = map.values.cwiseAbs2().cast<cd>();
    return map;
}

ComplexMap2D TwoPhotonSolution::g1(ChannelPair pair) const {
    if (!rows_.contains(pair))
        throw InvalidArgument("channel pair " + to_string(pair) + " not present for this coupling");
    const auto nt = static_cast<Eigen::Index>(grid_.n_t);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(nt, nt);
    for (const Channel eta : {Channel::R, Channel::L}) {
        const auto a = rows_.find({pair.first, eta});
        const auto b = rows_.find({pair.second, eta});
        if (a == rows_.end() || b == rows_.end()) continue;
        acc.noalias() += a->second.conjugate() * b->second.transpose();
    }
    acc *= 2.0 * grid_.dt;
    return ComplexMap2D(time_axis(grid_, "t"), time_axis(grid_, "t'"), std::move(acc));
}

std::vector<double> TwoPhotonSolution::flux(Channel ch) const {
    std::vector<double> out(grid_.n_t, 0.0);
    for (const Channel eta : {Channel::R, Channel::L}) {
        const auto it = rows_.find({ch, eta});
        if (it == rows_.end()) continue;
        const Eigen::VectorXd s = it->second.rowwise().squaredNorm();
        for (std::size_t k = 0; k < grid_.n_t; ++k)
            out[k] += 2.0 * grid_.dt * s[static_cast<Eigen::Index>(k)];
    }
    return out;
}

PairMaps TwoPhotonSolution::phi2_all() const {
    PairMaps maps;
    for (const auto p : pairs()) maps.emplace(p, phi2(p));
    return maps;
}

PairMaps TwoPhotonSolution::g2_all() const {
    PairMaps maps;
    for (const auto p : pairs()) maps.emplace(p, g2(p));
    return maps;
}

PairMaps TwoPhotonSolution::g1_all() const {
    PairMaps maps;
    for (const auto p : pairs()) maps.emplace(p, g1(p));
    return maps;
}

PairMaps project_out_2ph(const pulse::PulseSpec& spec, const SystemParams& params,
                         const SimGrid& grid) {
    return TwoPhotonSolution::compute(spec, params, grid).phi2_all();
}

PairMaps g2_two_photon(const pulse::PulseSpec& spec, const SystemParams& params,
                       const SimGrid& grid) {
    return TwoPhotonSolution::compute(spec, params, grid).g2_all();
}

PairMaps g1_two_photon(const pulse::PulseSpec& spec, const SystemParams& params,
                       const SimGrid& grid) {
    return TwoPhotonSolution::compute(spec, params, grid).g1_all();
}

namespace {

PopulationSeries finish_population(const pulse::PulseSpec& spec, const SimGrid& grid,
                                   std::vector<double> n_r, std::vector<double> n_l) {
    PopulationSeries out;
    out.grid = grid;
    out.n_pulse = pulse::pulse_flux(spec, grid);
    out.n_r = std::move(n_r);
    out.n_l = n_l.empty() ? std::vector<double>(grid.n_t, 0.0) : std::move(n_l);
    out.n_tls = population_from_fluxes(out.n_pulse, out.n_r, out.n_l, grid.dt);
    out.trunc_err.assign(grid.n_t, 0.0);
    for (std::size_t k = 0; k < grid.n_t; ++k) {
        const double v = out.n_tls[k];
        if (v < -kPopulationSlack || v > 1.0 + kPopulationSlack)
            throw ConservationViolation(fmt::format(
                "emitter population {:.6f} at t = {} outside [0, 1]", v, grid.time(k)));
    }
    return out;
}

} // namespace

PopulationSeries tls_population_scatter(const pulse::PulseSpec& spec,
                                        const TwoPhotonSolution& solution) {
    std::vector<double> n_l;
    if (solution.mode() == Coupling::Symmetric) n_l = solution.flux(Channel::L);
    return finish_population(spec, solution.grid(), solution.flux(Channel::R), std::move(n_l));
}

PopulationSeries tls_population_scatter(const pulse::PulseSpec& spec,
                                        const SystemParams& params, const SimGrid& grid) {
    if (spec.photon_number() == 1) {
        const auto out = project_out_1ph(spec, params, grid);
        std::vector<double> n_r(grid.n_t), n_l;
        for (std::size_t k = 0; k < grid.n_t; ++k) n_r[k] = std::norm(out.right[k]);
        if (!out.left.empty()) {
            n_l.resize(grid.n_t);
            for (std::size_t k = 0; k < grid.n_t; ++k) n_l[k] = std::norm(out.left[k]);
        }
        return finish_population(spec, grid, std::move(n_r), std::move(n_l));
    }
    if (spec.photon_number() == 2)
        return tls_population_scatter(spec, TwoPhotonSolution::compute(spec, params, grid));
    throw InvalidArgument(fmt::format("scattering populations need N in {{1, 2}}, got {}",
                                      spec.photon_number()));
}

} // namespace wqed::scatter
