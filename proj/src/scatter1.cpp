#include "wqed/scatter1.hpp"

#include <cmath>

#include <fmt/format.h>

#include "wqed/errors.hpp"
#include "wqed/spectral.hpp"

namespace wqed::scatter {

cd coeff_chiral(double omega, const SystemParams& params) {
    if (params.mode != Coupling::ChiralRight)
        throw InvalidParams("chiral coefficient requested for symmetric coupling");
    const double g = params.gamma();
    if (g < kDecoupledGamma) return 1.0;
    const double x = omega - params.delta;
    return cd(x, -0.5 * g) / cd(x, 0.5 * g);
}

SymmetricCoeffs coeff_symmetric(double omega, const SystemParams& params) {
    if (params.mode != Coupling::Symmetric)
        throw InvalidParams("symmetric coefficients requested for chiral coupling");
    if (params.delta != 0.0)
        throw UnsupportedDetuning(fmt::format(
            "symmetric closed forms are resonant only (delta = {})", params.delta));
    const double g = params.gamma();
    if (g < kDecoupledGamma) return {1.0, 0.0};
    const cd r = -g / cd(g, -2.0 * omega);
    return {1.0 + r, r};
}

cd channel_coeff(Channel ch, double omega, const SystemParams& params) {
    if (params.mode == Coupling::ChiralRight)
        return ch == Channel::R ? coeff_chiral(omega, params) : cd{0.0};
    const auto c = coeff_symmetric(omega, params);
    return ch == Channel::R ? c.t : c.r;
}

void require_scatter_supported(const SystemParams& params) {
    params.validate();
    if (params.mode == Coupling::Symmetric && params.delta != 0.0)
        throw UnsupportedDetuning(fmt::format(
            "symmetric closed forms are resonant only (delta = {})", params.delta));
}

ScatterCoeffs coefficients(const SystemParams& params, const SimGrid& grid) {
    require_scatter_supported(params);
    ScatterCoeffs out;
    out.omega.resize(grid.n_t);
    for (std::size_t j = 0; j < grid.n_t; ++j) {
        const double w = grid.omega(j);
        out.omega[j] = w;
        if (params.mode == Coupling::ChiralRight) {
            out.t_ch.push_back(coeff_chiral(w, params));
        } else {
            const auto c = coeff_symmetric(w, params);
            out.t_sym.push_back(c.t);
            out.r_sym.push_back(c.r);
        }
    }
    return out;
}

OnePhotonOutput project_out_1ph(const pulse::PulseSpec& spec, const SystemParams& params,
                                const SimGrid& grid) {
    require_scatter_supported(params);
    if (spec.photon_number() != 1)
        throw InvalidArgument(fmt::format("one-photon projection needs N = 1, got {}",
                                          spec.photon_number()));
    const std::size_t m = transform_friendly_size(kDefaultPadFactor * grid.n_t);
    const auto f = pulse::envelope_freq_padded(spec, grid, m);

    OnePhotonOutput out;
    out.grid = grid;
    out.norm = 0.0;
    const std::size_t nch = params.mode == Coupling::Symmetric ? 2 : 1;
    for (std::size_t c = 0; c < nch; ++c) {
        const Channel ch = c == 0 ? Channel::R : Channel::L;
        std::vector<cd> spec_out(m);
        for (std::size_t j = 0; j < m; ++j)
            spec_out[j] = f[j] * channel_coeff(ch, spectral::omega(j, m, grid.dt), params);
        auto phi = spectral::time_from_frequency(spec_out, grid.t0, grid.dt);
        for (const cd& v : phi) out.norm += std::norm(v) * grid.dt;
        phi.resize(grid.n_t);
        (ch == Channel::R ? out.right : out.left) = std::move(phi);
    }
    return out;
}

Axis time_axis(const SimGrid& grid, const std::string& label) {
    return {label, grid.t0, grid.dt, grid.n_t};
}

PairMaps g1_one_photon(const OnePhotonOutput& out) {
    PairMaps maps;
    const auto n = static_cast<Eigen::Index>(out.grid.n_t);
    auto column = [&](const std::vector<cd>& v) {
        return Eigen::Map<const Eigen::VectorXcd>(v.data(), n);
    };
    std::vector<Channel> chans{Channel::R};
    if (!out.left.empty()) chans.push_back(Channel::L);
    for (Channel a : chans)
        for (Channel b : chans) {
            const auto& pa = a == Channel::R ? out.right : out.left;
            const auto& pb = b == Channel::R ? out.right : out.left;
            Eigen::MatrixXcd v = column(pa).conjugate() * column(pb).transpose();
            maps.emplace(ChannelPair{a, b},
                         ComplexMap2D(time_axis(out.grid, "t"), time_axis(out.grid, "t'"),
                                      std::move(v)));
        }
    return maps;
}

PairMaps g1_one_photon(const pulse::PulseSpec& spec, const SystemParams& params,
                       const SimGrid& grid) {
    return g1_one_photon(project_out_1ph(spec, params, grid));
}

} // namespace wqed::scatter
