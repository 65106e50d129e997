#include "wqed/timebin.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed::timebin {

using tn::cd;
using tn::Mps;
using tn::SiteLabel;
using tn::SiteTensor;
using tn::Tensor;

namespace {

constexpr double kCapTolerance = 1e-6;
constexpr double kUnitarityTolerance = 1e-10;

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

Eigen::MatrixXcd identity(std::size_t d) {
    return Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Emitter basis: index 0 = ground, 1 = excited.
Eigen::MatrixXcd sigma_minus() {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

SiteTensor emitter_site(EmitterInit init) {
    Tensor t({1, 2, 1});
    t({0, init == EmitterInit::Excited ? 1u : 0u, 0}) = 1.0;
    return {std::move(t), SiteLabel::emitter()};
}

// Vacuum bin that passes the bond index through unchanged.
SiteTensor vacuum_bin(std::size_t bond, std::size_t d, Channel ch, std::size_t k) {
    Tensor t({bond, d, bond});
    for (std::size_t i = 0; i < bond; ++i) t({i, 0, i}) = 1.0;
    return {std::move(t), SiteLabel::bin(ch, k)};
}

// Probability weight of all occupation patterns with n_k <= cap, for the
// Fock state (sum_k c_k b_k^dag)^N / sqrt(N!) |0> with sum |c_k|^2 = 1.
double kept_weight(const std::vector<cd>& c, std::size_t n, std::size_t cap) {
    if (cap >= n) return 1.0;
    // w[j] = sum over patterns of the bins so far with j photons of prod |c|^(2 n_k) / n_k!
    std::vector<double> w(n + 1, 0.0), next(n + 1);
    w[0] = 1.0;
    for (const cd& ck : c) {
        const double p = std::norm(ck);
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t j = 0; j <= n; ++j) {
            double term = 1.0;
            for (std::size_t l = 0; l <= std::min(cap, j); ++l) {
                next[j] += w[j - l] * term;
                term *= p / static_cast<double>(l + 1);
            }
        }
        w.swap(next);
    }
    return std::exp(log_factorial(n)) * w[n];
}

void require_same_grid(const SimGrid& a, const SimGrid& b) {
    if (a.n_t != b.n_t || std::abs(a.dt - b.dt) > 1e-12 * a.dt || std::abs(a.t0 - b.t0) > 1e-9 * a.dt)
        throw GridMismatch("state and evolution config use different grids");
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt::format("{:.17g}", v[i]);
    }
    return out;
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

} // namespace

std::size_t TimeBinState::bin_site(Channel ch, std::size_t k) const {
    if (ch == Channel::L && mode != Coupling::Symmetric)
        throw SiteOutOfRange("chiral chains carry no left-moving bins");
    const std::size_t c = channels();
    return k * c + static_cast<std::size_t>(ch) + (k >= steps_done ? 1 : 0);
}

std::size_t default_n_max(int photon_number) {
    if (photon_number <= 0) return 1;
    return static_cast<std::size_t>(std::min(photon_number, 4));
}

TimeBinState build_fock_mps_from_amplitudes(const std::vector<cd>& c, int photon_number,
                                            const SimGrid& grid, std::size_t n_max,
                                            Coupling mode, EmitterInit init) {
    grid.validate();
    if (photon_number < 1)
        throw InvalidArgument(fmt::format("Fock pulse needs N >= 1, got {}", photon_number));
    if (n_max < 1) throw InvalidArgument("occupation cap must be at least 1");
    if (c.size() != grid.n_t)
        throw GridMismatch(fmt::format("{} bin amplitudes for {} time bins", c.size(), grid.n_t));
    const auto n = static_cast<std::size_t>(photon_number);
    const std::size_t d = n_max + 1;
    const std::size_t cap = std::min(n_max, n);

    double norm_c = 0.0;
    for (const cd& v : c) norm_c += std::norm(v);
    if (!(norm_c > 0.0)) throw InvalidArgument("bin amplitudes vanish");
    std::vector<cd> amp(c);
    for (cd& v : amp) v /= std::sqrt(norm_c);

    const double kept = kept_weight(amp, n, cap);
    if (1.0 - kept > kCapTolerance)
        throw OccupationCapTooLow(fmt::format(
            "occupation cap {} drops {:.3e} of the {}-photon state (limit {:.0e})", n_max,
            1.0 - kept, n, kCapTolerance));

    // Bond index = photons placed in earlier bins. A^(l)[i, i+l] = c^l / sqrt(l!).
    const std::size_t m = amp.size();
    const double global = std::exp(0.5 * log_factorial(n)) / std::sqrt(kept);
    std::vector<SiteTensor> sites;
    sites.reserve(m * (mode == Coupling::Symmetric ? 2 : 1) + 1);
    sites.push_back(emitter_site(init));
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t dl = k == 0 ? 1 : n + 1;
        const std::size_t dr = k + 1 == m ? 1 : n + 1;
        Tensor t({dl, d, dr});
        for (std::size_t i = 0; i < dl; ++i)
            for (std::size_t l = 0; l <= cap && i + l <= n; ++l) {
                const std::size_t j = i + l;
                if (k + 1 == m && j != n) continue;
                const std::size_t jr = k + 1 == m ? 0 : j;
                cd v = std::pow(amp[k], static_cast<double>(l)) *
                       std::exp(-0.5 * log_factorial(l));
                if (k == 0) v *= global;
                t({i, l, jr}) = v;
            }
        sites.emplace_back(std::move(t), SiteLabel::bin(Channel::R, k));
        if (mode == Coupling::Symmetric) sites.push_back(vacuum_bin(dr, d, Channel::L, k));
    }

    TimeBinState state;
    state.mps = Mps(std::move(sites));
    state.mps.canonicalize(0, tn::TruncationPolicy{SIZE_MAX, 0.0});
    state.mode = mode;
    state.grid = grid;
    state.n_max = n_max;
    state.excitations = static_cast<double>(n) + (init == EmitterInit::Excited ? 1.0 : 0.0);
    state.input_occupation.resize(m);
    for (std::size_t k = 0; k < m; ++k) state.input_occupation[k] = static_cast<double>(n) * std::norm(amp[k]);
    return state;
}

TimeBinState build_fock_mps(const pulse::PulseSpec& spec, const SimGrid& grid, std::size_t n_max,
                            Coupling mode, EmitterInit init) {
    if (spec.photon_number() == 0) return build_vacuum_state(grid, n_max, mode, init);
    auto f = pulse::envelope_time_shifted(spec, grid, 0.5 * grid.dt);
    for (cd& v : f) v *= std::sqrt(grid.dt);
    return build_fock_mps_from_amplitudes(f, spec.photon_number(), grid, n_max, mode, init);
}

TimeBinState build_vacuum_state(const SimGrid& grid, std::size_t n_max, Coupling mode,
                                EmitterInit init) {
    grid.validate();
    if (n_max < 1) throw InvalidArgument("occupation cap must be at least 1");
    const std::size_t d = n_max + 1;
    std::vector<SiteTensor> sites;
    sites.push_back(emitter_site(init));
    for (std::size_t k = 0; k < grid.n_t; ++k) {
        sites.push_back(vacuum_bin(1, d, Channel::R, k));
        if (mode == Coupling::Symmetric) sites.push_back(vacuum_bin(1, d, Channel::L, k));
    }
    TimeBinState state;
    state.mps = Mps(std::move(sites));
    state.mps.canonicalize(0, tn::TruncationPolicy{});
    state.mode = mode;
    state.grid = grid;
    state.n_max = n_max;
    state.excitations = init == EmitterInit::Excited ? 1.0 : 0.0;
    state.input_occupation.assign(grid.n_t, 0.0);
    return state;
}

Eigen::MatrixXcd step_hamiltonian(const SystemParams& params, double dt, std::size_t n_max) {
    params.validate();
    const std::size_t d = n_max + 1;
    const Eigen::MatrixXcd sm = sigma_minus();
    const Eigen::MatrixXcd sp = sm.adjoint();
    const Eigen::MatrixXcd b = tn::annihilation(d);
    const Eigen::MatrixXcd bd = b.adjoint();
    const Eigen::MatrixXcd id = identity(d);
    const bool sym = params.mode == Coupling::Symmetric;
    const Eigen::MatrixXcd field_id = sym ? kron(id, id) : id;

    Eigen::MatrixXcd h = params.delta * dt * kron(sp * sm, field_id);
    const Eigen::MatrixXcd bR = sym ? kron(b, id) : b;
    const Eigen::MatrixXcd bdR = sym ? kron(bd, id) : bd;
    h += std::sqrt(params.gamma_R * dt) * (kron(sp, bR) + kron(sm, bdR));
    if (sym) {
        h += std::sqrt(params.gamma_L * dt) * (kron(sp, kron(id, b)) + kron(sm, kron(id, bd)));
    }
    return h;
}

Eigen::MatrixXcd build_step_gate(const EvolutionConfig& config) {
    const Eigen::MatrixXcd h = step_hamiltonian(config.params, config.grid.dt, config.n_max);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
    if (eig.info() != Eigen::Success) throw NonUnitaryGate("eigendecomposition of the step Hamiltonian failed");
    const double hnorm = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (hnorm >= std::numbers::pi)
        throw StepTooLarge(fmt::format("step Hamiltonian norm {:.3f} >= pi; reduce dt", hnorm));
    if (hnorm >= 1.0)
        std::cerr << fmt::format("warning: step Hamiltonian norm {:.3f} >= 1; dt = {} is coarse\n",
                                 hnorm, config.grid.dt);

    Eigen::MatrixXcd u;
    if (config.gate_order <= 0) {
        Eigen::VectorXcd phases(eig.eigenvalues().size());
        for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::polar(1.0, -eig.eigenvalues()[i]);
        u = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
    } else {
        const cd mi(0.0, -1.0);
        Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
        u = term;
        for (int k = 1; k <= config.gate_order; ++k) {
            term = (mi / static_cast<double>(k)) * (h * term);
            u += term;
        }
    }
    const double dev = (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (dev > kUnitarityTolerance)
        throw NonUnitaryGate(fmt::format("step gate deviates from unitarity by {:.3e} (order {})",
                                         dev, config.gate_order));
    return u;
}

double Trajectory::max_excitation_drift() const {
    double initial = n_tls_initial;
    for (double v : input_occupation) initial += v;
    double m = std::abs(initial - excitations);
    for (const auto& s : steps) m = std::max(m, std::abs(s.excitation - excitations));
    return m;
}

namespace {

struct StepMeasure {
    double norm2{0.0};
    double n_r{0.0};
    double n_l{0.0};
    double n_e{0.0};
};

// Occupations read off the updated local tensor theta(a, r, [l,] e, b); the
// rest of the chain is in canonical form around it.
StepMeasure measure_local(const Tensor& theta, bool sym) {
    StepMeasure m;
    const auto& sh = theta.shape();
    const std::size_t a = sh[0], dr = sh[1];
    const std::size_t dl = sym ? sh[2] : 1;
    const std::size_t de = sym ? sh[3] : sh[2];
    const std::size_t b = sym ? sh[4] : sh[3];
    const cd* p = theta.data();
    for (std::size_t ib = 0; ib < b; ++ib)
        for (std::size_t e = 0; e < de; ++e)
            for (std::size_t l = 0; l < dl; ++l)
                for (std::size_t r = 0; r < dr; ++r)
                    for (std::size_t ia = 0; ia < a; ++ia) {
                        const double w = std::norm(*p++);
                        m.norm2 += w;
                        m.n_r += w * static_cast<double>(r);
                        m.n_l += w * static_cast<double>(l);
                        m.n_e += w * static_cast<double>(e);
                    }
    if (m.norm2 > 0.0) {
        m.n_r /= m.norm2;
        m.n_l /= m.norm2;
        m.n_e /= m.norm2;
    }
    return m;
}

double emitter_population(const TimeBinState& state) {
    const Tensor& e = state.mps.site(state.emitter_site()).data;
    double tot = 0.0, exc = 0.0;
    for (std::size_t b = 0; b < e.dim(2); ++b)
        for (std::size_t a = 0; a < e.dim(0); ++a) {
            tot += std::norm(e({a, 0, b}));
            const double w = std::norm(e({a, 1, b}));
            tot += w;
            exc += w;
        }
    return tot > 0.0 ? exc / tot : 0.0;
}

} // namespace

EvolutionResult evolve(TimeBinState state, const EvolutionConfig& config, std::size_t steps,
                       const std::function<void(std::size_t, const StepRecord&)>& on_step) {
    require_same_grid(state.grid, config.grid);
    config.params.validate();
    if (config.params.mode != state.mode)
        throw InvalidArgument("state and evolution config use different coupling modes");
    EvolutionConfig cfg = config;
    cfg.n_max = state.n_max;
    const Eigen::MatrixXcd gate = build_step_gate(cfg);

    const std::size_t total = state.grid.n_t;
    if (steps == 0) steps = total - state.steps_done;
    if (state.steps_done + steps > total)
        throw InvalidArgument(fmt::format("{} steps requested but only {} bins remain", steps,
                                          total - state.steps_done));

    const bool sym = state.mode == Coupling::Symmetric;
    const std::size_t d = state.phys_dim();
    const double dt = state.grid.dt;

    Trajectory traj;
    traj.grid = state.grid;
    traj.mode = state.mode;
    traj.excitations = state.excitations;
    traj.input_occupation = state.input_occupation;
    traj.n_tls_initial = emitter_population(state);

    double emitted = 0.0;
    for (std::size_t k = 0; k < state.steps_done; ++k) {
        // a restored state: earlier outputs already left the interaction
        const auto x = tn::expectation_mpo(state.mps, std::vector<tn::LocalOp>{
            {state.bin_site(Channel::R, k), tn::number_op(d)}});
        emitted += x.real();
        if (sym)
            emitted += tn::expectation_mpo(state.mps, std::vector<tn::LocalOp>{
                {state.bin_site(Channel::L, k), tn::number_op(d)}}).real();
    }
    emitted /= std::max(state.mps.norm2(), 1e-300);
    double incoming = 0.0;
    for (std::size_t k = state.steps_done; k < total; ++k) incoming += state.input_occupation[k];

    double trunc = 0.0;
    state.mps.move_center(state.emitter_site(), cfg.policy);
    traj.steps.reserve(steps);
    for (std::size_t step = 0; step < steps; ++step) {
        const std::size_t k = state.steps_done;
        const std::size_t e = state.emitter_site();
        Tensor theta = tn::contract(state.mps.site(e).data, {2}, state.mps.site(e + 1).data, {0});
        if (sym) theta = tn::contract(theta, {3}, state.mps.site(e + 2).data, {0});
        theta = tn::apply_local_operator(theta, 1, sym ? 3 : 2, gate);
        // (a, e, r, [l,] b) -> (a, r, [l,] e, b)
        theta = sym ? theta.permuted({0, 2, 3, 1, 4}) : theta.permuted({0, 2, 1, 3});

        const StepMeasure meas = measure_local(theta, sym);

        auto s1 = tn::split_svd(theta, 2, cfg.policy);
        double err = s1.error;
        state.mps.site(e) = SiteTensor(std::move(s1.left), SiteLabel::bin(Channel::R, k));
        if (sym) {
            auto s2 = tn::split_svd(s1.right, 2, cfg.policy);
            err += s2.error;
            state.mps.site(e + 1) = SiteTensor(std::move(s2.left), SiteLabel::bin(Channel::L, k));
            state.mps.site(e + 2) = SiteTensor(std::move(s2.right), SiteLabel::emitter());
        } else {
            state.mps.site(e + 1) = SiteTensor(std::move(s1.right), SiteLabel::emitter());
        }
        state.steps_done = k + 1;
        state.mps.set_center(state.emitter_site());
        trunc += err;
        if (trunc > cfg.truncation_budget)
            throw TruncationBudgetExceeded(fmt::format(
                "cumulative truncation error {:.3e} exceeds budget {:.1e} at step {}", trunc,
                cfg.truncation_budget, k));

        emitted += meas.n_r + (sym ? meas.n_l : 0.0);
        incoming -= state.input_occupation[k];
        StepRecord rec;
        rec.n_tls = meas.n_e;
        rec.n_r = meas.n_r / dt;
        rec.n_l = sym ? meas.n_l / dt : 0.0;
        rec.norm2 = meas.norm2;
        rec.trunc_err = trunc;
        rec.excitation = meas.n_e + emitted + std::max(incoming, 0.0);
        rec.bond = state.mps.site(state.emitter_site()).left();
        traj.steps.push_back(rec);
        if (on_step) on_step(k, rec);
    }
    return {std::move(traj), std::move(state)};
}

PopulationSeries measure_populations(const Trajectory& t) {
    const std::size_t n = std::min(t.grid.n_t, t.steps.size() + 1);
    const double dt = t.grid.dt;
    PopulationSeries out;
    out.grid = {t.grid.t0, dt, n};
    out.n_tls.resize(n);
    out.n_r.resize(n);
    out.n_l.resize(n);
    out.n_pulse.resize(n);
    out.trunc_err.resize(n);
    // midpoint sample k sits at t_k + dt/2; grid time t_k averages samples k-1 and k
    auto at_grid = [&](std::size_t k, auto&& sample, std::size_t count) {
        if (count == 0) return 0.0;
        const std::size_t hi = std::min(k, count - 1);
        const std::size_t lo = k == 0 ? 0 : std::min(k - 1, count - 1);
        return 0.5 * (sample(lo) + sample(hi));
    };
    const std::size_t ns = t.steps.size();
    for (std::size_t k = 0; k < n; ++k) {
        out.n_tls[k] = k == 0 ? t.n_tls_initial : t.steps[k - 1].n_tls;
        out.n_r[k] = at_grid(k, [&](std::size_t i) { return t.steps[i].n_r; }, ns);
        out.n_l[k] = at_grid(k, [&](std::size_t i) { return t.steps[i].n_l; }, ns);
        out.n_pulse[k] = at_grid(k, [&](std::size_t i) { return t.input_occupation[i] / dt; },
                                 t.input_occupation.size());
        out.trunc_err[k] = k == 0 ? 0.0 : t.steps[k - 1].trunc_err;
    }
    return out;
}

FluxSeries measure_fluxes(const Trajectory& t) {
    FluxSeries out;
    const std::size_t n = t.steps.size();
    out.axis = {"t", t.grid.t0 + 0.5 * t.grid.dt, t.grid.dt, n};
    for (std::size_t k = 0; k < n; ++k) {
        out.n_r.push_back(t.steps[k].n_r);
        out.n_l.push_back(t.steps[k].n_l);
        out.n_pulse.push_back(t.input_occupation[k] / t.grid.dt);
    }
    return out;
}

namespace {

// Right environments of a state whose bins up to the emitter are all
// left-canonical: env[p] is the density on the bond to the right of site p.
struct Environments {
    std::vector<Eigen::MatrixXcd> right;
    double norm2{1.0};
};

Environments right_environments(const TimeBinState& st, std::size_t last_site) {
    const Mps& mps = st.mps;
    Environments env;
    env.right.resize(last_site + 1);
    // everything right of last_site contracted exactly
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t p = mps.size(); p-- > last_site + 1;) {
        const auto& site = mps.site(p);
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(site.left(), site.left());
        for (std::size_t s = 0; s < site.phys(); ++s) {
            const Eigen::MatrixXcd a = site.slice(s);
            next.noalias() += a * r * a.adjoint();
        }
        r = std::move(next);
    }
    env.right[last_site] = r;
    for (std::size_t p = last_site; p > 0; --p) {
        const auto& site = mps.site(p);
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(site.left(), site.left());
        for (std::size_t s = 0; s < site.phys(); ++s) {
            const Eigen::MatrixXcd a = site.slice(s);
            next.noalias() += a * env.right[p] * a.adjoint();
        }
        env.right[p - 1] = std::move(next);
    }
    env.norm2 = env.right[0].trace().real();
    // site 0 has a unit left bond; its own contribution completes the norm
    {
        const auto& site = mps.site(0);
        cd acc = 0.0;
        for (std::size_t s = 0; s < site.phys(); ++s) {
            const Eigen::MatrixXcd a = site.slice(s);
            acc += (a * env.right[0] * a.adjoint()).trace();
        }
        env.norm2 = acc.real();
    }
    return env;
}

// Y_p = sum_{s,s'} O(s', s) A^s R_p A^{s' dag}: contracting Y with the left
// environment X gives <... O_p ...>.
Eigen::MatrixXcd closing_matrix(const SiteTensor& site, const Eigen::MatrixXcd& op,
                                const Eigen::MatrixXcd& right) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(site.left(), site.left());
    std::vector<Eigen::MatrixXcd> ar(site.phys());
    for (std::size_t s = 0; s < site.phys(); ++s) ar[s] = site.slice(s) * right;
    for (std::size_t sp = 0; sp < site.phys(); ++sp) {
        const Eigen::MatrixXcd adag = site.slice(sp).adjoint();
        for (std::size_t s = 0; s < site.phys(); ++s) {
            const cd o = op(static_cast<Eigen::Index>(sp), static_cast<Eigen::Index>(s));
            if (o != cd{0.0}) y.noalias() += o * ar[s] * adag;
        }
    }
    return y;
}

// X' = sum_{s,s'} O(s', s) A^{s' dag} X A^s (O = identity when op is null).
Eigen::MatrixXcd transfer(const SiteTensor& site, const Eigen::MatrixXcd& x,
                          const Eigen::MatrixXcd* op) {
    const auto l = static_cast<Eigen::Index>(site.left());
    const auto d = static_cast<Eigen::Index>(site.phys());
    const auto r = static_cast<Eigen::Index>(site.right());
    const auto a_lr = site.data.matrix(1); // l x (d r)
    Eigen::MatrixXcd xa = x * a_lr;       // (l, s, r) as l x (d r)
    if (op) {
        // apply O on the physical index of the ket
        Eigen::MatrixXcd tmp = Eigen::MatrixXcd::Zero(l, d * r);
        for (Eigen::Index rr = 0; rr < r; ++rr)
            tmp.middleCols(rr * d, d) = xa.middleCols(rr * d, d) * op->transpose();
        xa = std::move(tmp);
    }
    const Eigen::Map<const Eigen::MatrixXcd> a2(site.data.data(), l * d, r);
    const Eigen::Map<const Eigen::MatrixXcd> xa2(xa.data(), l * d, r);
    return a2.adjoint() * xa2;
}

struct PointOps {
    Eigen::MatrixXcd first;  // on the slot of axis 1
    Eigen::MatrixXcd second; // on the slot of axis 2
    Eigen::MatrixXcd same;   // product when both hit one site
    double scale{1.0};
    bool hermitian{false};   // value(j, i) = conj(value(i, j)) when the channels agree
};

ComplexMap2D two_point_map(const TimeBinState& st, ChannelPair pair, std::size_t bins,
                           const PointOps& ops) {
    if (pair.first == Channel::L || pair.second == Channel::L)
        if (st.mode != Coupling::Symmetric)
            throw InvalidArgument("chiral coupling has no left-moving output");
    if (bins == 0) bins = st.steps_done;
    if (bins > st.steps_done)
        throw BinStillInteracting(fmt::format(
            "requested {} time slots but the emitter has only passed {}", bins, st.steps_done));
    const Axis ax1{"t", st.grid.t0 + 0.5 * st.grid.dt, st.grid.dt, bins};
    Axis ax2 = ax1;
    ax2.label = "t'";
    ComplexMap2D map(ax1, ax2);
    if (bins == 0) return map;

    std::vector<std::size_t> s1(bins), s2(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        s1[k] = st.bin_site(pair.first, k);
        s2[k] = st.bin_site(pair.second, k);
    }
    const std::size_t last = std::max(s1.back(), s2.back());
    const Environments env = right_environments(st, last);
    if (!(env.norm2 > 0.0)) throw InvalidArgument("state has zero norm");
    const double scale = ops.scale / env.norm2;
    const Mps& mps = st.mps;

    // role of each site: index into s1 / s2, or -1
    std::vector<long> slot1(last + 1, -1), slot2(last + 1, -1);
    for (std::size_t k = 0; k < bins; ++k) {
        slot1[s1[k]] = static_cast<long>(k);
        slot2[s2[k]] = static_cast<long>(k);
    }
    std::vector<Eigen::MatrixXcd> y1(last + 1), y2(last + 1);
    for (std::size_t p = 0; p <= last; ++p) {
        if (slot1[p] >= 0) y1[p] = closing_matrix(mps.site(p), ops.first, env.right[p]);
        if (slot2[p] >= 0) y2[p] = closing_matrix(mps.site(p), ops.second, env.right[p]);
    }
    auto contract_xy = [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
        return (x.transpose().array() * y.array()).sum(); // tr(X Y)
    };

    const bool same_channel = pair.first == pair.second;
    for (std::size_t p = 0; p <= last; ++p) {
        const long i1 = slot1[p], i2 = slot2[p];
        if (i1 < 0 && i2 < 0) continue;
        if (same_channel) {
            const auto i = static_cast<Eigen::Index>(i1);
            map.values(i, i) = scale * closing_matrix(mps.site(p), ops.same, env.right[p]).trace();
        }
        // left environment at the bond left of p is the identity (left-canonical prefix)
        const auto dl = static_cast<Eigen::Index>(mps.site(p).left());
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dl, dl);
        Eigen::MatrixXcd x1, x2;
        const bool run1 = i1 >= 0, run2 = i2 >= 0 && !(same_channel && ops.hermitian);
        if (run1) x1 = transfer(mps.site(p), id, &ops.first);
        if (run2) x2 = transfer(mps.site(p), id, &ops.second);
        for (std::size_t q = p + 1; q <= last; ++q) {
            if (run1 && slot2[q] >= 0)
                map.values(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(slot2[q])) =
                    scale * contract_xy(x1, y2[q]);
            if (run2 && slot1[q] >= 0)
                map.values(static_cast<Eigen::Index>(slot1[q]), static_cast<Eigen::Index>(i2)) =
                    scale * contract_xy(x2, y1[q]);
            if (q == last) break;
            if (run1) x1 = transfer(mps.site(q), x1, nullptr);
            if (run2) x2 = transfer(mps.site(q), x2, nullptr);
        }
    }
    if (same_channel && ops.hermitian) {
        for (Eigen::Index i = 0; i < map.values.rows(); ++i)
            for (Eigen::Index j = 0; j < i; ++j) map.values(i, j) = std::conj(map.values(j, i));
    }
    return map;
}

} // namespace

ComplexMap2D measure_g1(const TimeBinState& final_state, ChannelPair pair, std::size_t bins) {
    const std::size_t d = final_state.phys_dim();
    const Eigen::MatrixXcd b = tn::annihilation(d);
    PointOps ops{b.adjoint(), b, tn::number_op(d), 1.0 / final_state.grid.dt, true};
    return two_point_map(final_state, pair, bins, ops);
}

ComplexMap2D measure_g2(const TimeBinState& final_state, ChannelPair pair, std::size_t bins) {
    const std::size_t d = final_state.phys_dim();
    const Eigen::MatrixXcd n = tn::number_op(d);
    const Eigen::MatrixXcd nn = n * (n - Eigen::MatrixXcd::Identity(n.rows(), n.cols()));
    const double dt = final_state.grid.dt;
    PointOps ops{n, n, nn, 1.0 / (dt * dt), true};
    return two_point_map(final_state, pair, bins, ops);
}

void save_state(const std::string& path, const TimeBinState& state) {
    std::map<std::string, std::string> meta{
        {"mode", to_string(state.mode)},
        {"t0", fmt::format("{:.17g}", state.grid.t0)},
        {"dt", fmt::format("{:.17g}", state.grid.dt)},
        {"n_t", std::to_string(state.grid.n_t)},
        {"n_max", std::to_string(state.n_max)},
        {"steps_done", std::to_string(state.steps_done)},
        {"excitations", fmt::format("{:.17g}", state.excitations)},
        {"input_occupation", join_doubles(state.input_occupation)},
    };
    tn::save_checkpoint(path, state.mps, meta);
}

TimeBinState load_state(const std::string& path) {
    auto cp = tn::load_checkpoint(path);
    auto field = [&](const char* key) -> const std::string& {
        const auto it = cp.meta.find(key);
        if (it == cp.meta.end()) throw CheckpointError(std::string("missing metadata key ") + key);
        return it->second;
    };
    TimeBinState st;
    try {
        st.mode = field("mode") == "chiral" ? Coupling::ChiralRight : Coupling::Symmetric;
        st.grid = {std::stod(field("t0")), std::stod(field("dt")), std::stoul(field("n_t"))};
        st.n_max = std::stoul(field("n_max"));
        st.steps_done = std::stoul(field("steps_done"));
        st.excitations = std::stod(field("excitations"));
        st.input_occupation = split_doubles(field("input_occupation"));
    } catch (const std::logic_error& e) {
        throw CheckpointError(std::string("malformed metadata: ") + e.what());
    }
    st.mps = std::move(cp.state);
    if (st.mps.size() != st.grid.n_t * st.channels() + 1)
        throw CheckpointError("site count does not match the stored grid");
    return st;
}

} // namespace wqed::timebin
