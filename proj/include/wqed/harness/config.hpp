// config.hpp: Flat key = value run configuration

#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wqed/grid.hpp"
#include "wqed/pulse.hpp"
#include "wqed/system.hpp"
#include "wqed/tensor.hpp"
#include "wqed/timebin.hpp"

namespace wqed::harness {

enum class Engine { Scatter, Mps, Compare };

std::string to_string(Engine e);

struct OutputRequest {
    bool envelope{true};
    bool populations{true};
    bool g1{true};
    bool g2{true};
    bool phi2{false};
    std::vector<ChannelPair> pairs; // empty: RR only (plus LL/RL/LR when asked)
};

struct RunConfig {
    Engine engine{Engine::Scatter};
    SystemParams system{SystemParams::symmetric()};
    std::vector<int> photons{1};

    std::string pulse_kind{"gaussian"};
    double t_c{3.0};
    double sigma_t{1.0};
    std::filesystem::path pulse_file;

    std::optional<double> t_start;
    std::optional<double> t_end;
    double dt{0.02};

    timebin::EmitterInit initial_emitter{timebin::EmitterInit::Ground};
    std::optional<std::size_t> n_max;
    tn::TruncationPolicy policy;
    int gate_order{0};
    double truncation_budget{1e-3};

    OutputRequest outputs;
    std::filesystem::path output_dir{"wqed-out"};
    double tolerance{0.02};

    std::vector<double> fig3_sigmas{0.5, 1.0, 5.0};
    double fig3_omega_max{4.0};
    std::size_t fig3_points{161};

    // Keys exactly as read, for echoing into output metadata.
    std::vector<std::pair<std::string, std::string>> entries;

    pulse::PulseSpec make_pulse(int photon_number) const;
    SimGrid make_grid(const pulse::PulseSpec& spec) const;
    timebin::EvolutionConfig evolution(const SimGrid& grid, int photon_number) const;
};

// Throws ConfigError naming the source and line for unknown keys, malformed
// values, or violated invariants.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

} // namespace wqed::harness
