#include "wqed/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "wqed/errors.hpp"

namespace wqed::harness {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Error context for one config line.
struct Where {
    const std::string& source;
    std::size_t line;
    const std::string& key;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(fmt::format("{}:{}: {}: {}", source, line, key, msg));
    }
};

double to_double(const Where& w, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end || !std::isfinite(out)) w.fail("expected a number, got '" + v + "'");
    return out;
}

long to_int(const Where& w, const std::string& v) {
    long out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) w.fail("expected an integer, got '" + v + "'");
    return out;
}

std::size_t to_count(const Where& w, const std::string& v, long min = 1) {
    const long n = to_int(w, v);
    if (n < min) w.fail(fmt::format("must be >= {}", min));
    return static_cast<std::size_t>(n);
}

ChannelPair to_pair(const Where& w, const std::string& v) {
    const std::string u = trim(v);
    if (u.size() != 2) w.fail("channel pair must be two letters from {R, L}, got '" + v + "'");
    auto ch = [&](char c) {
        if (c == 'R' || c == 'r') return Channel::R;
        if (c == 'L' || c == 'l') return Channel::L;
        w.fail("unknown channel '" + std::string(1, c) + "'");
    };
    return {ch(u[0]), ch(u[1])};
}

const std::set<std::string> kKeys{
    "engine",       "coupling",        "gamma_r",        "gamma_l",    "delta",
    "photons",      "pulse",           "t_c",            "sigma_t",    "pulse_file",
    "t_start",      "t_end",           "dt",             "initial_emitter",
    "n_max",        "chi_max",         "svd_cutoff",     "gate_order", "truncation_budget",
    "outputs",      "channels",        "output_dir",     "tolerance",  "fig3_sigmas",
    "fig3_omega_max", "fig3_points"};

} // namespace

std::string to_string(Engine e) {
    switch (e) {
    case Engine::Scatter: return "scatter";
    case Engine::Mps: return "mps";
    case Engine::Compare: return "compare";
    }
    return "?";
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::optional<double> gamma_r, gamma_l;
    std::string line;
    std::size_t lineno = 0;
    std::size_t coupling_line = 0;

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string empty;
        if (eq == std::string::npos)
            Where{source, lineno, empty}.fail("expected 'key = value', got '" + body + "'");
        const std::string key = lower(trim(body.substr(0, eq)));
        const std::string value = trim(body.substr(eq + 1));
        const Where w{source, lineno, key};
        if (!kKeys.contains(key)) w.fail("unknown key");
        if (seen.contains(key)) w.fail(fmt::format("duplicate key (first set on line {})", seen[key]));
        seen[key] = lineno;
        if (value.empty()) w.fail("missing value");
        cfg.entries.emplace_back(key, value);
        const std::string v = lower(value);

        if (key == "engine") {
            if (v == "scatter") cfg.engine = Engine::Scatter;
            else if (v == "mps") cfg.engine = Engine::Mps;
            else if (v == "compare") cfg.engine = Engine::Compare;
            else w.fail("expected scatter, mps or compare");
        } else if (key == "coupling") {
            coupling_line = lineno;
            if (v == "symmetric") cfg.system.mode = Coupling::Symmetric;
            else if (v == "chiral") cfg.system.mode = Coupling::ChiralRight;
            else w.fail("expected symmetric or chiral");
        } else if (key == "gamma_r") {
            gamma_r = to_double(w, value);
        } else if (key == "gamma_l") {
            gamma_l = to_double(w, value);
        } else if (key == "delta") {
            cfg.system.delta = to_double(w, value);
        } else if (key == "photons") {
            cfg.photons.clear();
            for (const auto& item : split_list(value)) {
                const long n = to_int(w, item);
                if (n < 0) w.fail("photon numbers must be >= 0");
                cfg.photons.push_back(static_cast<int>(n));
            }
            if (cfg.photons.empty()) w.fail("empty photon list");
        } else if (key == "pulse") {
            if (v != "gaussian" && v != "sampled") w.fail("expected gaussian or sampled");
            cfg.pulse_kind = v;
        } else if (key == "t_c") {
            cfg.t_c = to_double(w, value);
        } else if (key == "sigma_t") {
            cfg.sigma_t = to_double(w, value);
            if (!(cfg.sigma_t > 0.0)) w.fail("must be positive");
        } else if (key == "pulse_file") {
            cfg.pulse_file = value;
        } else if (key == "t_start") {
            cfg.t_start = to_double(w, value);
        } else if (key == "t_end") {
            cfg.t_end = to_double(w, value);
        } else if (key == "dt") {
            cfg.dt = to_double(w, value);
            if (!(cfg.dt > 0.0)) w.fail("must be positive");
        } else if (key == "initial_emitter") {
            if (v == "ground") cfg.initial_emitter = timebin::EmitterInit::Ground;
            else if (v == "excited") cfg.initial_emitter = timebin::EmitterInit::Excited;
            else w.fail("expected ground or excited");
        } else if (key == "n_max") {
            cfg.n_max = to_count(w, value);
        } else if (key == "chi_max") {
            cfg.policy.chi_max = to_count(w, value);
        } else if (key == "svd_cutoff") {
            cfg.policy.svd_cutoff = to_double(w, value);
            if (cfg.policy.svd_cutoff < 0.0) w.fail("must be >= 0");
        } else if (key == "gate_order") {
            cfg.gate_order = static_cast<int>(to_count(w, value, 0));
        } else if (key == "truncation_budget") {
            cfg.truncation_budget = to_double(w, value);
            if (!(cfg.truncation_budget > 0.0)) w.fail("must be positive");
        } else if (key == "outputs") {
            OutputRequest req{false, false, false, false, false, cfg.outputs.pairs};
            for (const auto& item : split_list(v)) {
                if (item == "envelope") req.envelope = true;
                else if (item == "populations") req.populations = true;
                else if (item == "g1") req.g1 = true;
                else if (item == "g2") req.g2 = true;
                else if (item == "phi2") req.phi2 = true;
                else w.fail("unknown output '" + item + "' (envelope, populations, g1, g2, phi2)");
            }
            cfg.outputs = req;
        } else if (key == "channels") {
            cfg.outputs.pairs.clear();
            for (const auto& item : split_list(value)) cfg.outputs.pairs.push_back(to_pair(w, item));
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "tolerance") {
            cfg.tolerance = to_double(w, value);
            if (!(cfg.tolerance > 0.0)) w.fail("must be positive");
        } else if (key == "fig3_sigmas") {
            cfg.fig3_sigmas.clear();
            for (const auto& item : split_list(value)) {
                const double s = to_double(w, item);
                if (!(s > 0.0)) w.fail("widths must be positive");
                cfg.fig3_sigmas.push_back(s);
            }
        } else if (key == "fig3_omega_max") {
            cfg.fig3_omega_max = to_double(w, value);
            if (!(cfg.fig3_omega_max > 0.0)) w.fail("must be positive");
        } else if (key == "fig3_points") {
            cfg.fig3_points = to_count(w, value, 2);
        }
    }

    // Rates are in units of the total decay rate, which is therefore 1.
    auto at = [&](const char* key) { return seen.contains(key) ? seen[key] : coupling_line; };
    const std::string empty;
    if (cfg.system.mode == Coupling::ChiralRight) {
        cfg.system.gamma_R = gamma_r.value_or(1.0);
        cfg.system.gamma_L = gamma_l.value_or(0.0);
        if (cfg.system.gamma_L != 0.0)
            Where{source, at("gamma_l"), empty}.fail("gamma_l must be 0 for chiral coupling");
    } else {
        cfg.system.gamma_R = gamma_r.value_or(0.5);
        cfg.system.gamma_L = gamma_l.value_or(0.5);
    }
    if (std::abs(cfg.system.gamma() - 1.0) > 1e-12)
        Where{source, at("gamma_r"), empty}.fail(fmt::format(
            "gamma_r + gamma_l must equal 1 (rates are in units of gamma), got {}", cfg.system.gamma()));
    try {
        cfg.system.validate();
    } catch (const InvalidParams& e) {
        Where{source, at("gamma_r"), empty}.fail(e.what());
    }
    if (cfg.system.mode == Coupling::ChiralRight)
        for (const auto& p : cfg.outputs.pairs)
            if (p.first == Channel::L || p.second == Channel::L)
                Where{source, at("channels"), empty}.fail("chiral coupling has no left-moving channel");
    if (cfg.engine == Engine::Compare)
        for (int n : cfg.photons)
            if (n < 1 || n > 2)
                Where{source, at("photons"), empty}.fail("compare mode supports N = 1 or 2 only");
    if (cfg.pulse_kind == "sampled" && cfg.pulse_file.empty())
        Where{source, at("pulse"), empty}.fail("sampled pulse needs pulse_file");
    if (cfg.t_start && cfg.t_end && !(*cfg.t_end > *cfg.t_start))
        Where{source, at("t_end"), empty}.fail("t_end must exceed t_start");
    if (cfg.outputs.pairs.empty()) cfg.outputs.pairs.push_back({Channel::R, Channel::R});
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    RunConfig cfg = parse_config(in, path.string());
    if (!cfg.pulse_file.empty() && cfg.pulse_file.is_relative())
        cfg.pulse_file = path.parent_path() / cfg.pulse_file;
    return cfg;
}

pulse::PulseSpec RunConfig::make_pulse(int photon_number) const {
    if (pulse_kind == "gaussian") return pulse::PulseSpec::gaussian(photon_number, t_c, sigma_t);
    std::ifstream in(pulse_file);
    if (!in) throw ConfigError("cannot open pulse file " + pulse_file.string());
    std::vector<double> t;
    std::vector<pulse::cd> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#' || std::isalpha(static_cast<unsigned char>(body[0])))
            continue;
        const auto cols = split_list(body);
        const std::string key = "pulse_file";
        const Where w{pulse_file.string(), lineno, key};
        if (cols.size() != 3) w.fail("expected three columns t, re, im");
        t.push_back(to_double(w, cols[0]));
        values.emplace_back(to_double(w, cols[1]), to_double(w, cols[2]));
    }
    if (t.size() < 2) throw ConfigError(pulse_file.string() + ": need at least two samples");
    const double step = t[1] - t[0];
    for (std::size_t k = 1; k < t.size(); ++k)
        if (std::abs(t[k] - t[0] - static_cast<double>(k) * step) > 1e-9 * std::max(1.0, std::abs(step)) * static_cast<double>(k))
            throw ConfigError(pulse_file.string() + ": time column is not uniformly spaced");
    return pulse::PulseSpec::sampled(photon_number, SimGrid{t[0], step, t.size()}, std::move(values));
}

SimGrid RunConfig::make_grid(const pulse::PulseSpec& spec) const {
    const SimGrid def = pulse::default_grid(spec);
    if (!spec.is_gaussian()) return def;
    const double t0 = t_start.value_or(def.t0);
    const double t1 = t_end.value_or(std::max(def.t_end(), t0 + dt));
    return SimGrid::span(t0, t1, dt);
}

timebin::EvolutionConfig RunConfig::evolution(const SimGrid& grid, int photon_number) const {
    timebin::EvolutionConfig ev;
    ev.params = system;
    ev.grid = grid;
    ev.policy = policy;
    ev.gate_order = gate_order;
    ev.truncation_budget = truncation_budget;
    ev.n_max = n_max.value_or(timebin::default_n_max(photon_number));
    return ev;
}

} // namespace wqed::harness
