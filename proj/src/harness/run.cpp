#include "wqed/harness/run.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <mutex>

#include <fmt/format.h>

#include "wqed/errors.hpp"
#include "wqed/harness/io.hpp"
#include "wqed/scatter1.hpp"
#include "wqed/scatter2.hpp"
#include "wqed/timebin.hpp"

namespace wqed::harness {
namespace {

using scatter::TwoPhotonSolution;

Metadata base_meta(const RunConfig& cfg, const std::string& engine, int photons) {
    Metadata m{
        {"engine", engine},
        {"version", WQED_VERSION},
        {"units", "gamma=1 (times in 1/gamma, rates and fluxes in gamma)"},
        {"coupling", to_string(cfg.system.mode)},
        {"gamma_r", format_number(cfg.system.gamma_R)},
        {"gamma_l", format_number(cfg.system.gamma_L)},
        {"delta", format_number(cfg.system.delta)},
        {"photons", std::to_string(photons)},
        {"pulse", cfg.pulse_kind},
    };
    if (cfg.pulse_kind == "gaussian") {
        m.emplace_back("t_c", format_number(cfg.t_c));
        m.emplace_back("sigma_t", format_number(cfg.sigma_t));
    } else {
        m.emplace_back("pulse_file", cfg.pulse_file.filename().string());
    }
    m.emplace_back("tolerance", format_number(cfg.tolerance));
    return m;
}

void add_grid(Metadata& m, const SimGrid& g) {
    m.emplace_back("t0", format_number(g.t0));
    m.emplace_back("dt", format_number(g.dt));
    m.emplace_back("n_t", std::to_string(g.n_t));
}

void add_mps(Metadata& m, const timebin::EvolutionConfig& ev, double trunc) {
    m.emplace_back("n_max", std::to_string(ev.n_max));
    m.emplace_back("chi_max", std::to_string(ev.policy.chi_max));
    m.emplace_back("svd_cutoff", format_number(ev.policy.svd_cutoff));
    m.emplace_back("gate_order", std::to_string(ev.gate_order));
    m.emplace_back("truncation_budget", format_number(ev.truncation_budget));
    m.emplace_back("truncation_error", format_number(trunc));
}

std::string suffix(int n) { return fmt::format("N{}", n); }

std::vector<ChannelPair> active_pairs(const RunConfig& cfg) {
    std::vector<ChannelPair> out;
    for (const auto& p : cfg.outputs.pairs) {
        if (cfg.system.mode == Coupling::ChiralRight && (p.first == Channel::L || p.second == Channel::L))
            continue;
        out.push_back(p);
    }
    return out;
}

void write_envelope(const RunConfig& cfg, const pulse::PulseSpec& spec, const SimGrid& grid,
                    const std::filesystem::path& dir, std::vector<std::filesystem::path>& files) {
    const auto f = pulse::envelope_time(spec, grid);
    const auto flux = pulse::pulse_flux(spec, grid);
    std::vector<double> t(grid.n_t), re(grid.n_t), im(grid.n_t), a2(grid.n_t);
    for (std::size_t k = 0; k < grid.n_t; ++k) {
        t[k] = grid.time(k);
        re[k] = f[k].real();
        im[k] = f[k].imag();
        a2[k] = std::norm(f[k]);
    }
    Metadata meta = base_meta(cfg, "pulse", spec.photon_number());
    add_grid(meta, grid);
    const auto path = dir / fmt::format("envelope_{}.csv", suffix(spec.photon_number()));
    write_columns(path, meta, {"t", "re_f", "im_f", "abs2_f", "n_pulse"}, {t, re, im, a2, flux});
    files.push_back(path);
}

void write_populations(const std::filesystem::path& path, Metadata meta,
                       const PopulationSeries& p) {
    add_grid(meta, p.grid);
    std::vector<double> t(p.grid.n_t);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = p.grid.time(k);
    write_columns(path, meta, {"t", "n_tls", "n_r", "n_l", "n_pulse", "trunc_err"},
                  {t, p.n_tls, p.n_r, p.n_l, p.n_pulse, p.trunc_err});
}

void append(std::vector<std::filesystem::path>& files, const std::vector<std::filesystem::path>& more) {
    files.insert(files.end(), more.begin(), more.end());
}

// Results of one engine at one photon number.
struct ScatterRun {
    PopulationSeries pop;
    PairMaps g1, g2, phi2;
    double fitted_constant{1.0};
    double raw_norm{1.0};
};

// Maps are evaluated on `map_grid` (the time-bin midpoints in compare mode).
ScatterRun run_scatter_engine(const RunConfig& cfg, const pulse::PulseSpec& spec,
                              const SimGrid& grid, const SimGrid& map_grid, bool want_g1,
                              bool want_g2, bool want_phi2) {
    const int n = spec.photon_number();
    if (n < 1 || n > 2)
        throw InvalidArgument(fmt::format("the scattering engine handles N = 1 or 2, got {}", n));
    ScatterRun out;
    const auto pairs = active_pairs(cfg);
    if (n == 1) {
        out.pop = scatter::tls_population_scatter(spec, cfg.system, grid);
        const auto one = scatter::project_out_1ph(spec, cfg.system, map_grid);
        out.raw_norm = one.norm;
        if (want_g1) {
            const auto all = scatter::g1_one_photon(one);
            for (const auto& p : pairs) out.g1.emplace(p, all.at(p));
        }
        if (want_g2)
            for (const auto& p : pairs)
                out.g2.emplace(p, ComplexMap2D(scatter::time_axis(map_grid, "t"),
                                               scatter::time_axis(map_grid, "t'")));
        return out;
    }
    const auto sol = TwoPhotonSolution::compute(spec, cfg.system, grid);
    out.pop = scatter::tls_population_scatter(spec, sol);
    out.fitted_constant = sol.fitted_constant();
    out.raw_norm = sol.raw_norm();
    const bool same = std::abs(map_grid.t0 - grid.t0) < 1e-12 && map_grid.n_t == grid.n_t;
    const TwoPhotonSolution map_sol = same ? sol : TwoPhotonSolution::compute(spec, cfg.system, map_grid);
    for (const auto& p : pairs) {
        if (want_g1) out.g1.emplace(p, map_sol.g1(p));
        if (want_g2) out.g2.emplace(p, map_sol.g2(p));
        if (want_phi2) out.phi2.emplace(p, map_sol.phi2(p));
    }
    return out;
}

struct MpsRun {
    PopulationSeries pop;
    PairMaps g1, g2;
    timebin::EvolutionConfig ev;
    double trunc{0.0};
    double drift{0.0};
};

MpsRun run_mps_engine(const RunConfig& cfg, const pulse::PulseSpec& spec, const SimGrid& grid,
                      bool want_g1, bool want_g2) {
    MpsRun out;
    out.ev = cfg.evolution(grid, spec.photon_number());
    auto state = spec.photon_number() == 0
                     ? timebin::build_vacuum_state(grid, out.ev.n_max, cfg.system.mode, cfg.initial_emitter)
                     : timebin::build_fock_mps(spec, grid, out.ev.n_max, cfg.system.mode, cfg.initial_emitter);
    auto res = timebin::evolve(std::move(state), out.ev);
    out.pop = timebin::measure_populations(res.trajectory);
    out.trunc = res.trajectory.steps.empty() ? 0.0 : res.trajectory.steps.back().trunc_err;
    out.drift = res.trajectory.max_excitation_drift();
    for (const auto& p : active_pairs(cfg)) {
        if (want_g1) out.g1.emplace(p, timebin::measure_g1(res.final_state, p));
        if (want_g2) out.g2.emplace(p, timebin::measure_g2(res.final_state, p));
    }
    return out;
}

void write_maps(const std::filesystem::path& dir, const std::string& kind, const std::string& engine,
                int n, const PairMaps& maps, const Metadata& meta,
                std::vector<std::filesystem::path>& files) {
    for (const auto& [pair, map] : maps) {
        Metadata m = meta;
        m.emplace_back("observable", kind + "_" + to_string(pair));
        append(files, write_map(dir, fmt::format("{}_{}_{}_{}", kind, to_string(pair), engine, suffix(n)),
                                map, m));
    }
}

// Runs `job` for every photon number, on up to `workers` threads; results keep sweep order.
template <class Job>
void sweep(const RunConfig& cfg, const RunOptions& opts, Job job) {
    const unsigned workers = std::max(1u, opts.workers);
    const auto& ns = cfg.photons;
    for (std::size_t start = 0; start < ns.size(); start += workers) {
        std::vector<std::future<void>> batch;
        for (std::size_t i = start; i < std::min(ns.size(), start + workers); ++i)
            batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                       [&, i] { job(i, ns[i]); }));
        for (auto& f : batch) f.get();
    }
}

} // namespace

std::filesystem::path resolve_output_dir(const RunConfig& cfg, const RunOptions& opts) {
    if (opts.output_dir) return *opts.output_dir;
    if (const char* env = std::getenv("WQED_OUTPUT_DIR"); env && *env) return env;
    return cfg.output_dir;
}

RunOutcome run(const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
    if (cfg.engine == Engine::Compare) return compare(cfg, opts, log);
    const auto dir = resolve_output_dir(cfg, opts);
    std::filesystem::create_directories(dir);
    std::mutex mu;
    std::vector<RunOutcome> parts(cfg.photons.size());

    sweep(cfg, opts, [&](std::size_t idx, int n) {
        RunOutcome& part = parts[idx];
        const auto spec = cfg.make_pulse(n);
        const auto grid = cfg.make_grid(spec);
        if (cfg.outputs.envelope && n > 0) write_envelope(cfg, spec, grid, dir, part.files);
        const std::string engine = to_string(cfg.engine);
        Metadata meta = base_meta(cfg, engine, n);
        if (cfg.engine == Engine::Scatter) {
            const auto r = run_scatter_engine(cfg, spec, grid, grid, cfg.outputs.g1, cfg.outputs.g2,
                                              cfg.outputs.phi2 && n == 2);
            meta.emplace_back("output_norm", format_number(r.raw_norm));
            meta.emplace_back("fitted_constant", format_number(r.fitted_constant));
            if (cfg.outputs.populations) {
                const auto path = dir / fmt::format("populations_scatter_{}.csv", suffix(n));
                write_populations(path, meta, r.pop);
                part.files.push_back(path);
            }
            Metadata mm = meta;
            add_grid(mm, grid);
            write_maps(dir, "g1", engine, n, r.g1, mm, part.files);
            write_maps(dir, "g2", engine, n, r.g2, mm, part.files);
            write_maps(dir, "phi2", engine, n, r.phi2, mm, part.files);
        } else {
            const auto r = run_mps_engine(cfg, spec, grid, cfg.outputs.g1, cfg.outputs.g2);
            add_mps(meta, r.ev, r.trunc);
            meta.emplace_back("excitation_drift", format_number(r.drift));
            if (cfg.outputs.populations) {
                const auto path = dir / fmt::format("populations_mps_{}.csv", suffix(n));
                write_populations(path, meta, r.pop);
                part.files.push_back(path);
            }
            Metadata mm = meta;
            add_grid(mm, grid);
            mm.emplace_back("map_times", "bin midpoints t0 + dt/2 + k dt");
            write_maps(dir, "g1", engine, n, r.g1, mm, part.files);
            write_maps(dir, "g2", engine, n, r.g2, mm, part.files);
        }
        std::lock_guard lock(mu);
        if (opts.verbosity > 0) log << fmt::format("{} engine, N = {}: {} files\n", engine, n, part.files.size());
    });

    RunOutcome out;
    for (auto& p : parts) append(out.files, p.files);
    return out;
}

RunOutcome compare(const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
    for (int n : cfg.photons)
        if (n < 1 || n > 2) throw ConfigError("compare mode supports N = 1 or 2 only");
    const auto dir = resolve_output_dir(cfg, opts);
    std::filesystem::create_directories(dir);
    std::vector<RunOutcome> parts(cfg.photons.size());
    std::mutex mu;

    sweep(cfg, opts, [&](std::size_t idx, int n) {
        RunOutcome& part = parts[idx];
        const auto spec = cfg.make_pulse(n);
        const auto grid = cfg.make_grid(spec);
        // the time-bin maps live on bin midpoints
        const SimGrid mid = grid.shifted(0.5 * grid.dt);
        const bool g1 = cfg.outputs.g1, g2 = cfg.outputs.g2 && n == 2;
        const auto s = run_scatter_engine(cfg, spec, grid, mid, g1, g2, false);
        const auto m = run_mps_engine(cfg, spec, grid, g1, g2);

        const Axis taxis{"t", grid.t0, grid.dt, grid.n_t};
        const double tol = cfg.tolerance;
        auto name = [&](const std::string& what) { return fmt::format("N{} {}", n, what); };
        auto& rep = part.report;
        rep.entries.push_back(compare_series(name("n_tls"), taxis, s.pop.n_tls, taxis, m.pop.n_tls, tol));
        rep.entries.push_back(compare_series(name("n_r"), taxis, s.pop.n_r, taxis, m.pop.n_r, tol));
        if (cfg.system.mode == Coupling::Symmetric)
            rep.entries.push_back(compare_series(name("n_l"), taxis, s.pop.n_l, taxis, m.pop.n_l, tol));
        for (const auto& [pair, map] : s.g1)
            rep.entries.push_back(compare_maps(name("|G1_" + to_string(pair) + "|"), map, m.g1.at(pair), tol,
                                               Resample::None, true));
        for (const auto& [pair, map] : s.g2)
            rep.entries.push_back(compare_maps(name("G2_" + to_string(pair)), map, m.g2.at(pair), tol));
        rep.diagnostics.push_back(fmt::format(
            "N{}: grid t0={} dt={} n_t={}; scatter output norm {:.10f}, fitted constant {:.10f}; "
            "mps truncation error {:.3e}, excitation drift {:.3e}, n_max {}, chi_max {}",
            n, grid.t0, grid.dt, grid.n_t, s.raw_norm, s.fitted_constant, m.trunc, m.drift,
            m.ev.n_max, m.ev.policy.chi_max));
        if (cfg.outputs.g2 && n == 1)
            rep.diagnostics.push_back("N1: G2 vanishes identically for one photon; not compared");

        Metadata meta = base_meta(cfg, "compare", n);
        if (cfg.outputs.populations) {
            Metadata sm = base_meta(cfg, "scatter", n);
            sm.emplace_back("fitted_constant", format_number(s.fitted_constant));
            const auto ps = dir / fmt::format("populations_scatter_{}.csv", suffix(n));
            write_populations(ps, sm, s.pop);
            Metadata mm = base_meta(cfg, "mps", n);
            add_mps(mm, m.ev, m.trunc);
            const auto pm = dir / fmt::format("populations_mps_{}.csv", suffix(n));
            write_populations(pm, mm, m.pop);
            part.files.push_back(ps);
            part.files.push_back(pm);
        }
        Metadata mapm = meta;
        add_grid(mapm, mid);
        write_maps(dir, "g1", "scatter", n, s.g1, mapm, part.files);
        write_maps(dir, "g1", "mps", n, m.g1, mapm, part.files);
        write_maps(dir, "g2", "scatter", n, s.g2, mapm, part.files);
        write_maps(dir, "g2", "mps", n, m.g2, mapm, part.files);
        std::lock_guard lock(mu);
        if (opts.verbosity > 0) log << fmt::format("compared N = {}\n", n);
    });

    RunOutcome out;
    for (auto& p : parts) {
        append(out.files, p.files);
        out.report.entries.insert(out.report.entries.end(), p.report.entries.begin(), p.report.entries.end());
        out.report.diagnostics.insert(out.report.diagnostics.end(), p.report.diagnostics.begin(),
                                      p.report.diagnostics.end());
    }
    const auto path = dir / "compare_report.txt";
    {
        std::ofstream rep(path);
        if (!rep) throw IoError("cannot write " + path.string());
        for (const auto& [k, v] : base_meta(cfg, "compare", cfg.photons.front())) rep << '#' << k << '=' << v << '\n';
        rep << out.report.to_text();
    }
    out.files.push_back(path);
    out.exit_code = out.report.all_pass() ? 0 : 1;
    log << out.report.to_text();
    return out;
}

RunOutcome export_fig3_maps(const RunConfig& cfg, const RunOptions& opts, std::ostream& log) {
    const auto dir = resolve_output_dir(cfg, opts);
    std::filesystem::create_directories(dir);
    const SystemParams params = SystemParams::symmetric();
    const double wmax = cfg.fig3_omega_max;
    const double step = 2.0 * wmax / static_cast<double>(cfg.fig3_points - 1);
    const Axis w1{"omega1", -wmax, step, cfg.fig3_points};
    const Axis w2{"omega2", -wmax, step, cfg.fig3_points};
    RunOutcome out;
    for (double sigma : cfg.fig3_sigmas) {
        const auto spec = pulse::PulseSpec::gaussian(2, 0.0, sigma);
        const auto lin = scatter::i_lin(spec, params, w1, w2).at({Channel::R, Channel::R});
        const auto nlin = scatter::i_nlin(spec, params, w1, w2);
        Metadata meta{{"engine", "scatter"},
                      {"version", WQED_VERSION},
                      {"units", "gamma=1 (frequencies in gamma)"},
                      {"coupling", "symmetric"},
                      {"photons", "2"},
                      {"t_c", "0"},
                      {"sigma_t", format_number(sigma)}};
        const std::string tag = fmt::format("sigma{}", format_number(sigma));
        Metadata ml = meta;
        ml.emplace_back("observable", "I_lin_RR");
        append(out.files, write_map(dir, "ilin_RR_" + tag, lin, ml));
        Metadata mn = meta;
        mn.emplace_back("observable", "I_nlin (identical for every channel pair)");
        append(out.files, write_map(dir, "inlin_" + tag, nlin, mn));
        if (opts.verbosity > 0) log << fmt::format("fig3 maps for sigma_t = {}\n", sigma);
    }
    return out;
}

} // namespace wqed::harness
