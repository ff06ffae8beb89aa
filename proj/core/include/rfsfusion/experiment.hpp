#pragma once

#include "rfsfusion/gci_fusion.hpp"
#include "rfsfusion/glmb_filter.hpp"
#include "rfsfusion/metrics.hpp"
#include "rfsfusion/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rfs {

/// What to run and how. Method names:
///   local-node-<i>  the Vo-Vo filter of node i alone (1-based)
///   fogmb-fusion    first-order (PHD-matching) fusion baseline
///   sogmb-fusion    second-order fusion
struct ExperimentSpec {
    std::string scenario_path;
    std::vector<std::string> methods;
    int n_runs = 1;
    std::uint64_t base_seed = 1;
    std::string output_dir = ".";
    int threads = 1;

    GlmbFilterParams filter;
    FusionParams fusion;
    SogmbOptions sogmb;
    FogmbOptions fogmb;

    /// When set, per-step posterior dumps of run 0 are written here.
    std::optional<std::string> dump_dir;
};

/// Load an experiment spec from JSON (schema in docs/file-formats.md).
ExperimentSpec load_experiment_spec(const std::string& path);

struct RunFailure {
    int run = 0;
    std::string message;
};

struct ExperimentResult {
    std::map<std::string, MethodStatistics> statistics;
    int failed_runs = 0;              // runs excluded after filter divergence
    std::vector<RunFailure> failures; // one record per excluded run
    int fusion_fallback_steps = 0;    // steps where fusion fell back to node 1
    std::string statistics_csv_path;
};

/// Run the distributed-tracking experiment: per run and step, every node
/// filters its own scan; fusion methods marginalize the node posteriors,
/// approximate them (second- or first-order), fuse them sequentially and
/// extract MAP estimates. Scores are reduced over runs and written as CSV.
/// Deterministic for a fixed spec and base seed.
ExperimentResult run_experiment(const ExperimentSpec& spec, const ScenarioConfig& scenario);

/// Convenience overload that loads the scenario from spec.scenario_path.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Derive plot-ready series files from a statistics CSV:
///   cardinality_vs_time.csv   step,method,mean_card,true_card
///   ospa_vs_time.csv          step,method,mean_ospa
///   cardinality_std_band.csv  step,method,mean_card,band_lo,band_hi
/// Returns the paths written.
std::vector<std::string> emit_plotdata(const std::string& statistics_csv,
                                       const std::string& output_dir);

} // namespace rfs
