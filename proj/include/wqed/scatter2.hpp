// scatter2.hpp: Two-photon frequency-domain scattering engine

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "wqed/grid.hpp"
#include "wqed/map2d.hpp"
#include "wqed/observables.hpp"
#include "wqed/pulse.hpp"
#include "wqed/scatter1.hpp"
#include "wqed/system.hpp"

namespace wqed::scatter {

// s(w) = sqrt(gamma) / ((w - delta) + i gamma/2)
cd s_function(double omega, const SystemParams& params);

// Bound-state kernel for symmetric coupling (delta = 0):
// (4 / (pi gamma)) r(nu1) r(nu2) r(w1) r(w2) / r((w1 + w2)/2)
cd kernel_T_sym(double nu1, double nu2, double w1, double w2, const SystemParams& params);

// Bound-state kernel for chiral coupling:
// (i sqrt(gamma) / pi) s(nu1) s(nu2) [s(w1) + s(w2)]
cd kernel_T_ch(double nu1, double nu2, double w1, double w2, const SystemParams& params);

// Trapezoidal quadrature over the relative frequency Delta' in [-range, range].
struct QuadratureOptions {
    double min_range{20.0};   // in units of gamma
    double width_factor{8.0}; // range >= width_factor / sigma_t
    double max_step{0.1};     // the axis step is subdivided until <= max_step * gamma
    double tolerance{1e-6};   // relative to the largest kernel value
    bool check_convergence{true};
};

// Linear part f(w1) f(w2) chi^mu(w1) chi^mu'(w2), one map per ordered channel pair.
PairMaps i_lin(const pulse::PulseSpec& spec, const SystemParams& params, const Axis& w1,
               const Axis& w2);
PairMaps i_lin(const pulse::PulseSpec& spec, const SystemParams& params, const SimGrid& grid);

// Nonlinear part (1/2) int dDelta' f(w'-D') f(w'+D') T(w'-D', w'+D', w1, w2),
// w' = (w1 + w2)/2. Identical for every channel pair. Both axes must share the
// same step. Throws QuadratureNotConverged when doubling the range and halving
// the step moves any value by more than the tolerance.
ComplexMap2D i_nlin(const pulse::PulseSpec& spec, const SystemParams& params, const Axis& w1,
                    const Axis& w2, const QuadratureOptions& opts = {});
ComplexMap2D i_nlin(const pulse::PulseSpec& spec, const SystemParams& params,
                    const SimGrid& grid, const QuadratureOptions& opts = {});

// Output two-photon state evaluated once and shared by every two-photon
// observable. psi_{mu mu'}(t1, t2) is the unit-norm two-photon wavefunction
// (sum over ordered channel pairs of int int |psi|^2 = 1); the projected
// wavefunction of the literature is phi2 = sqrt(2) psi so that G2 = |phi2|^2.
class TwoPhotonSolution {
public:
    static TwoPhotonSolution compute(const pulse::PulseSpec& spec, const SystemParams& params,
                                     const SimGrid& grid,
                                     std::size_t pad_factor = kDefaultPadFactor,
                                     const QuadratureOptions& opts = {});

    const SimGrid& grid() const { return grid_; }
    Coupling mode() const { return mode_; }
    std::vector<ChannelPair> pairs() const;

    // Norm of the output state before the final rescale (should be 1).
    double raw_norm() const { return raw_norm_; }
    // Global factor applied to enforce unit norm, 1/sqrt(raw_norm).
    double fitted_constant() const { return fitted_constant_; }

    ComplexMap2D phi2(ChannelPair pair) const;
    ComplexMap2D g2(ChannelPair pair) const;
    ComplexMap2D g1(ChannelPair pair) const;
    std::vector<double> flux(Channel ch) const; // G1_{mu mu}(t, t)

    PairMaps phi2_all() const;
    PairMaps g2_all() const;
    PairMaps g1_all() const;

private:
    SimGrid grid_;
    Coupling mode_{Coupling::Symmetric};
    double raw_norm_{1.0};
    double fitted_constant_{1.0};
    // psi_{mu eta}(t_k, s) for t_k in the output window and s over the whole
    // padded period (the first n_t columns are the window itself). Already
    // scaled by the fitted constant.
    std::map<ChannelPair, Eigen::MatrixXcd> rows_;
};

PairMaps project_out_2ph(const pulse::PulseSpec& spec, const SystemParams& params,
                         const SimGrid& grid);
PairMaps g2_two_photon(const pulse::PulseSpec& spec, const SystemParams& params,
                       const SimGrid& grid);
PairMaps g1_two_photon(const pulse::PulseSpec& spec, const SystemParams& params,
                       const SimGrid& grid);

// Emitter population from excitation conservation for N in {1, 2}.
// Throws ConservationViolation if n_TLS leaves [-1e-3, 1 + 1e-3].
PopulationSeries tls_population_scatter(const pulse::PulseSpec& spec,
                                        const SystemParams& params, const SimGrid& grid);
// Same, reusing an already computed two-photon solution.
PopulationSeries tls_population_scatter(const pulse::PulseSpec& spec,
                                        const TwoPhotonSolution& solution);

} // namespace wqed::scatter
