// Command-line driver: one subcommand per pipeline, config-driven,
// deterministic outputs.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "breatherlab/config.hpp"
#include "breatherlab/pipelines.hpp"

namespace bl = breatherlab;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    bool quiet = false;
    bool verbose = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "path to the JSON run config")->required();
    sub->add_option("--override", opts.overrides,
                    "dotted-path override key.path=value (repeatable)");
    sub->add_flag("--quiet", opts.quiet, "suppress progress output");
    sub->add_flag("--verbose", opts.verbose, "extra progress output");
}

int run_pipeline(const CommonOpts& opts, bl::Pipeline pipeline) {
    bl::json j;
    try {
        j = bl::load_json(opts.config_path);
        for (const std::string& ov : opts.overrides) bl::apply_override(j, ov);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bl::kExitConfigError;
    }
    bl::RunConfig cfg;
    try {
        cfg = bl::config_from_json(j);
    } catch (const bl::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return bl::kExitConfigError;
    }
    if (j.contains("pipeline") && cfg.pipeline != pipeline) {
        std::cerr << "config error: config pipeline '" << bl::to_string(cfg.pipeline)
                  << "' does not match the subcommand\n";
        return bl::kExitConfigError;
    }
    cfg.pipeline = pipeline;
    const int verbosity = opts.quiet ? 0 : (opts.verbose ? 2 : 1);
    return bl::run(cfg, verbosity);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"breatherlab: time-periodic solutions of nonlinear Klein-Gordon equations"};
    app.require_subcommand(1);

    CommonOpts evolve_o, solve_o, sweep_o, analyze_o, fermi_o, accept_o;
    add_common(app.add_subcommand("evolve", "propagate a field over one period and report diagnostics"), evolve_o);
    add_common(app.add_subcommand("solve", "compute one breather candidate by Newton iteration"), solve_o);
    add_common(app.add_subcommand("sweep", "continue a family over eps_list and analyze it"), sweep_o);
    add_common(app.add_subcommand("analyze", "mode split and profile decomposition of a stored solution"), analyze_o);
    add_common(app.add_subcommand("fermi", "resonance integrals and second-harmonic diagnostics"), fermi_o);
    add_common(app.add_subcommand("accept", "run the verification suite and write the report"), accept_o);

    std::string trace_dir;
    CLI::App* trace = app.add_subcommand("trace", "print the verification table of a completed run");
    trace->add_option("--dir", trace_dir, "artifact directory of an accept run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("evolve")) return run_pipeline(evolve_o, bl::Pipeline::evolve);
        if (app.got_subcommand("solve")) return run_pipeline(solve_o, bl::Pipeline::solve);
        if (app.got_subcommand("sweep")) return run_pipeline(sweep_o, bl::Pipeline::sweep);
        if (app.got_subcommand("analyze")) return run_pipeline(analyze_o, bl::Pipeline::analyze);
        if (app.got_subcommand("fermi")) return run_pipeline(fermi_o, bl::Pipeline::fermi);
        if (app.got_subcommand("accept")) return run_pipeline(accept_o, bl::Pipeline::accept);
        if (app.got_subcommand("trace")) {
            const auto rows = bl::traceability_report(trace_dir);
            std::printf("%-4s %-70s %-14s %-12s %s\n", "id", "property", "measured", "tolerance",
                        "verdict");
            for (const auto& r : rows)
                std::printf("%-4s %-70s %-14s %-12s %s\n", r.id.c_str(), r.property.c_str(),
                            r.measured.c_str(), r.tolerance.c_str(), r.verdict.c_str());
            return bl::kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bl::kExitNumericalError;
    }
    return bl::kExitConfigError;
}
