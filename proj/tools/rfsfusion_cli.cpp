#include <rfsfusion/errors.hpp>
#include <rfsfusion/experiment.hpp>
#include <rfsfusion/scenario.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

int cmd_run(const std::string& spec_path, const std::string& output_dir_override,
            int runs_override, std::int64_t seed_override, int threads_override) {
    rfs::ExperimentSpec spec = rfs::load_experiment_spec(spec_path);
    if (!output_dir_override.empty()) spec.output_dir = output_dir_override;
    if (runs_override > 0) spec.n_runs = runs_override;
    if (seed_override >= 0) spec.base_seed = static_cast<std::uint64_t>(seed_override);
    if (threads_override > 0) spec.threads = threads_override;

    const rfs::ExperimentResult result = rfs::run_experiment(spec);
    std::cout << "wrote " << result.statistics_csv_path << '\n';
    if (result.failed_runs > 0) {
        std::cout << result.failed_runs << " run(s) excluded:\n";
        for (const auto& f : result.failures) {
            std::cout << "  run " << f.run << ": " << f.message << '\n';
        }
    }
    if (result.fusion_fallback_steps > 0) {
        std::cout << result.fusion_fallback_steps
                  << " fusion step(s) fell back to the reference node\n";
    }
    for (const auto& [method, stats] : result.statistics) {
        double mean = 0.0;
        for (double v : stats.mean_ospa) mean += v;
        mean /= static_cast<double>(stats.mean_ospa.size());
        std::cout << "  " << method << ": time-averaged OSPA " << mean << " m\n";
    }
    return kExitOk;
}

int cmd_validate(const std::string& scenario_path) {
    const rfs::ScenarioConfig config = rfs::load_scenario(scenario_path);
    std::cout << "scenario '" << config.name << "' is valid: " << config.steps << " steps, "
              << config.tracks.size() << " tracks, " << config.sensors.size() << " sensors\n";
    return kExitOk;
}

int cmd_emit_plotdata(const std::string& csv_path, const std::string& output_dir) {
    for (const std::string& path : rfs::emit_plotdata(csv_path, output_dir)) {
        std::cout << "wrote " << path << '\n';
    }
    return kExitOk;
}

int cmd_init_scenario(const std::string& which, const std::string& out_path) {
    rfs::ScenarioConfig config;
    if (which == "scenario1") {
        config = rfs::scenario1();
    } else if (which == "scenario2") {
        config = rfs::scenario2();
    } else {
        std::cerr << "unknown bundled scenario '" << which
                  << "' (expected scenario1 or scenario2)\n";
        return kExitUsage;
    }
    rfs::save_scenario(config, out_path);
    std::cout << "wrote " << out_path << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-target tracking with per-node GLMB filters and "
                 "GCI fusion of marginalized posteriors"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string output_dir;
    int runs_override = 0;
    std::int64_t seed_override = -1;
    int threads_override = 0;
    CLI::App* run = app.add_subcommand("run", "Run an experiment spec and write result CSVs");
    run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    run->add_option("--output-dir", output_dir, "override the spec's output directory");
    run->add_option("--runs", runs_override, "override the number of Monte Carlo runs");
    run->add_option("--seed", seed_override, "override the base seed");
    run->add_option("--threads", threads_override, "override run parallelism");

    std::string scenario_path;
    CLI::App* validate =
        app.add_subcommand("validate-scenario", "Check a scenario file against its schema");
    validate->add_option("scenario", scenario_path, "scenario file (JSON)")->required();

    std::string csv_path;
    std::string plot_dir = ".";
    CLI::App* plotdata =
        app.add_subcommand("emit-plotdata", "Derive plot-ready series from a results CSV");
    plotdata->add_option("csv", csv_path, "results CSV from 'run'")->required();
    plotdata->add_option("--out-dir", plot_dir, "directory for the series files");

    std::string bundled;
    std::string bundled_out;
    CLI::App* init =
        app.add_subcommand("init-scenario", "Write a bundled scenario file to disk");
    init->add_option("name", bundled, "scenario1 or scenario2")->required();
    init->add_option("output", bundled_out, "destination path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(spec_path, output_dir, runs_override, seed_override,
                           threads_override);
        }
        if (validate->parsed()) {
            return cmd_validate(scenario_path);
        }
        if (plotdata->parsed()) {
            return cmd_emit_plotdata(csv_path, plot_dir);
        }
        if (init->parsed()) {
            return cmd_init_scenario(bundled, bundled_out);
        }
    } catch (const rfs::SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
