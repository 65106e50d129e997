// scatter1.hpp: One-photon frequency-domain scattering engine

#pragma once

#include <complex>
#include <vector>

#include "wqed/grid.hpp"
#include "wqed/map2d.hpp"
#include "wqed/pulse.hpp"
#include "wqed/system.hpp"

namespace wqed::scatter {

using cd = std::complex<double>;

// Below this total rate the emitter is treated as decoupled (all coefficients -> identity).
inline constexpr double kDecoupledGamma = 1e-12;

// chi(w) = (w - delta - i gamma/2) / (w - delta + i gamma/2). Requires ChiralRight.
cd coeff_chiral(double omega, const SystemParams& params);

struct SymmetricCoeffs {
    cd t;
    cd r;
};

// r(w) = -gamma / (gamma - 2 i w), t = 1 + r. Requires Symmetric with delta == 0
// (UnsupportedDetuning otherwise).
SymmetricCoeffs coeff_symmetric(double omega, const SystemParams& params);

// Per-channel one-photon response chi^mu(w): transmission into R, reflection into L.
cd channel_coeff(Channel ch, double omega, const SystemParams& params);

// Checks that params are supported by the closed-form scattering engines.
void require_scatter_supported(const SystemParams& params);

struct ScatterCoeffs {
    std::vector<double> omega;
    std::vector<cd> t_ch;
    std::vector<cd> t_sym;
    std::vector<cd> r_sym;
};

// Coefficients over the grid's frequency axis. Only the fields valid for the
// coupling mode are filled.
ScatterCoeffs coefficients(const SystemParams& params, const SimGrid& grid);

// Projected output wavefunction phi^1_mu(t_k) per channel. `left` is empty
// for chiral coupling.
struct OnePhotonOutput {
    SimGrid grid;
    std::vector<cd> right;
    std::vector<cd> left;
    double norm{1.0}; // sum_mu int |phi_mu|^2 dt over the padded transform window
};

// Transforms are zero-padded to transform_friendly_size(pad_factor * n_t).
inline constexpr std::size_t kDefaultPadFactor = 3;

OnePhotonOutput project_out_1ph(const pulse::PulseSpec& spec, const SystemParams& params,
                                const SimGrid& grid);

// G1_{mu mu'}(t, t') = conj(phi_mu(t)) phi_mu'(t'); one map per ordered channel pair.
PairMaps g1_one_photon(const pulse::PulseSpec& spec, const SystemParams& params,
                       const SimGrid& grid);
PairMaps g1_one_photon(const OnePhotonOutput& out);

Axis time_axis(const SimGrid& grid, const std::string& label);

} // namespace wqed::scatter
