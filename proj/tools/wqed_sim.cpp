// wqed-sim: command-line front end for the waveguide-QED simulator.
//
//   wqed-sim run <config>       run the configured engine (or comparison)
//   wqed-sim compare <config>   run both engines and compare them
//   wqed-sim fig3 <config>      export the two-photon frequency maps
//
// Exit status: 0 success, 1 comparison outside tolerance, 2 config or engine error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wqed/errors.hpp"
#include "wqed/harness/run.hpp"

int main(int argc, char** argv) {
    using namespace wqed::harness;

    CLI::App app{"Few-photon waveguide QED simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(WQED_VERSION));

    std::string config_path;
    std::string output_dir;
    int verbosity = 0;
    unsigned workers = 1;
    app.add_option("--output-dir", output_dir, "Override the output directory");
    app.add_flag("-v,--verbose", verbosity, "Print progress (repeat for more)");
    app.add_option("--workers", workers, "Concurrent runs in a photon-number sweep")
        ->check(CLI::Range(1u, 256u));

    auto* run_cmd = app.add_subcommand("run", "Run the engine selected in the config");
    auto* cmp_cmd = app.add_subcommand("compare", "Run both engines and compare observables");
    auto* fig_cmd = app.add_subcommand("fig3", "Export I_lin / I_nlin frequency maps");
    for (auto* sub : {run_cmd, cmp_cmd, fig_cmd})
        sub->add_option("config", config_path, "Configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    RunOptions opts;
    opts.verbosity = verbosity;
    opts.workers = workers;
    if (!output_dir.empty()) opts.output_dir = output_dir;

    try {
        const RunConfig cfg = load_config(config_path);
        RunOutcome outcome;
        if (app.got_subcommand(run_cmd)) outcome = run(cfg, opts, std::cout);
        else if (app.got_subcommand(cmp_cmd)) outcome = compare(cfg, opts, std::cout);
        else outcome = export_fig3_maps(cfg, opts, std::cout);
        if (verbosity > 0)
            for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
        return outcome.exit_code;
    } catch (const wqed::Error& e) {
        std::cerr << fmt::format("wqed-sim: {} (while processing {})\n", e.what(), config_path);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << fmt::format("wqed-sim: unexpected failure: {}\n", e.what());
        return 2;
    }
}
