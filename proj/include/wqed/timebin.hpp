// timebin.hpp: Time-bin matrix-product-state engine for N-photon Fock pulses
//
// The waveguide field is cut into bins of width dt. Bin k covers
// [t_k, t_k + dt] and carries the increment dB = int b(t) dt over that interval,
// so [dB, dB^dag] = dt. We work with the normalized bin operator b_k = dB / sqrt(dt).
// The chain starts as [E, R_0, (L_0), R_1, (L_1), ...]. Every step swaps the
// emitter E past the bins of the current time slot, so after k steps the
// chain reads [R_0, (L_0), ..., R_{k-1}, (L_{k-1}), E, R_k, ...].

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wqed/grid.hpp"
#include "wqed/map2d.hpp"
#include "wqed/observables.hpp"
#include "wqed/pulse.hpp"
#include "wqed/system.hpp"
#include "wqed/tensor.hpp"

namespace wqed::timebin {

enum class EmitterInit { Ground, Excited };

struct TimeBinState {
    tn::Mps mps;
    Coupling mode{Coupling::Symmetric};
    SimGrid grid;
    std::size_t n_max{1};
    std::size_t steps_done{0};
    // Expected total excitation number (photons plus initial emitter excitation).
    double excitations{0.0};
    // Initial mean occupation of every input bin (R channel).
    std::vector<double> input_occupation;

    std::size_t phys_dim() const { return n_max + 1; }
    std::size_t channels() const { return mode == Coupling::Symmetric ? 2 : 1; }
    std::size_t emitter_site() const { return steps_done * channels(); }
    // Chain position of the bin (channel, k); L bins exist in symmetric mode only.
    std::size_t bin_site(Channel ch, std::size_t k) const;
};

struct EvolutionConfig {
    SystemParams params;
    SimGrid grid;
    tn::TruncationPolicy policy;
    // 0 selects the exact exponential; p > 0 a Taylor series of order p,
    // accepted only if unitary within 1e-10.
    int gate_order{0};
    double truncation_budget{1e-3};
    std::size_t n_max{1};
};

// Default per-bin occupation cap: N for N <= 4, otherwise 4.
std::size_t default_n_max(int photon_number);

// Fock-pulse MPS from the multinomial expansion of (sum_k c_k b_k^dag)^N / sqrt(N!),
// with c_k = f(t_k + dt/2) sqrt(dt) renormalized so that sum |c_k|^2 = 1.
// Throws OccupationCapTooLow if the configuration mass lost to n_max exceeds 1e-6.
TimeBinState build_fock_mps(const pulse::PulseSpec& spec, const SimGrid& grid,
                            std::size_t n_max, Coupling mode,
                            EmitterInit init = EmitterInit::Ground);

// Same construction from explicit bin amplitudes (used for small exact checks).
TimeBinState build_fock_mps_from_amplitudes(const std::vector<tn::cd>& c, int photon_number,
                                            const SimGrid& grid, std::size_t n_max,
                                            Coupling mode,
                                            EmitterInit init = EmitterInit::Ground);

// Empty waveguide with the emitter in `init`.
TimeBinState build_vacuum_state(const SimGrid& grid, std::size_t n_max, Coupling mode,
                                EmitterInit init = EmitterInit::Excited);

// Step Hamiltonian H_k = Delta dt s+s- + sum_mu sqrt(gamma_mu dt)(s+ b_mu + b_mu^dag s-)
// on emitter (x) R (x) L, Kronecker order; the L factor is absent for chiral coupling.
Eigen::MatrixXcd step_hamiltonian(const SystemParams& params, double dt, std::size_t n_max);

// exp(-i H_k). Throws StepTooLarge when ||H_k|| >= pi, warns to stderr above 1.
Eigen::MatrixXcd build_step_gate(const EvolutionConfig& config);

struct StepRecord {
    double n_tls{0.0};      // emitter population after the step, at t_{k+1}
    double n_r{0.0};        // output flux in the bin just emitted, at t_k + dt/2
    double n_l{0.0};
    double norm2{1.0};
    double trunc_err{0.0};  // cumulative
    double excitation{0.0}; // closure: n_TLS + emitted + still incoming
    std::size_t bond{1};    // largest bond next to the emitter
};

struct Trajectory {
    SimGrid grid;
    Coupling mode{Coupling::Symmetric};
    double n_tls_initial{0.0};
    double excitations{0.0};
    std::vector<double> input_occupation;
    std::vector<StepRecord> steps;

    double max_excitation_drift() const;
};

struct EvolutionResult {
    Trajectory trajectory;
    TimeBinState final_state;
};

// Runs all grid.n_t steps (or `steps` if nonzero). Throws TruncationBudgetExceeded
// if the cumulative discarded weight exceeds config.truncation_budget.
EvolutionResult evolve(TimeBinState state, const EvolutionConfig& config,
                       std::size_t steps = 0,
                       const std::function<void(std::size_t, const StepRecord&)>& on_step = {});

// Series on the grid times t_k. Fluxes recorded at bin midpoints are averaged
// onto the grid; n_pulse is the incident occupation divided by dt.
PopulationSeries measure_populations(const Trajectory& trajectory);

// Raw output fluxes at the bin midpoints t_k + dt/2.
struct FluxSeries {
    Axis axis;
    std::vector<double> n_r, n_l, n_pulse;
};
FluxSeries measure_fluxes(const Trajectory& trajectory);

// Two-time maps over emitted bins, on the midpoint axis t0 + dt/2 + k dt.
// G1(t, t') = <b^dag_mu(t) b_mu'(t')> / dt and
// G2(t, t') = <b^dag_mu(t) b^dag_mu'(t') b_mu'(t') b_mu(t)> / dt^2.
// `bins` limits the map to the first `bins` time slots (0 = all emitted).
// Throws BinStillInteracting if the slots requested lie at or beyond the emitter.
ComplexMap2D measure_g1(const TimeBinState& final_state, ChannelPair pair, std::size_t bins = 0);
ComplexMap2D measure_g2(const TimeBinState& final_state, ChannelPair pair, std::size_t bins = 0);

// Checkpoint helpers: the tensor checkpoint plus engine metadata.
void save_state(const std::string& path, const TimeBinState& state);
TimeBinState load_state(const std::string& path);

} // namespace wqed::timebin
