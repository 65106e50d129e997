// run.hpp: Orchestration of engine runs, comparisons and figure exports

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "wqed/harness/compare.hpp"
#include "wqed/harness/config.hpp"

namespace wqed::harness {

struct RunOptions {
    std::optional<std::filesystem::path> output_dir; // overrides config and environment
    int verbosity{0};
    unsigned workers{1};
};

struct RunOutcome {
    CompareReport report;
    std::vector<std::filesystem::path> files;
    int exit_code{0};
};

// Resolution order: options.output_dir, then WQED_OUTPUT_DIR, then the config.
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const RunOptions& opts);

// Runs the configured engine for every photon number in the sweep.
RunOutcome run(const RunConfig& cfg, const RunOptions& opts, std::ostream& log);

// Runs both engines and compares populations and the requested maps.
// Throws ConfigError unless every photon number is 1 or 2.
RunOutcome compare(const RunConfig& cfg, const RunOptions& opts, std::ostream& log);

// Re and Im of I_lin^RR and I_nlin for every sigma in cfg.fig3_sigmas,
// pulse centred at t_c = 0, symmetric coupling.
RunOutcome export_fig3_maps(const RunConfig& cfg, const RunOptions& opts, std::ostream& log);

} // namespace wqed::harness
