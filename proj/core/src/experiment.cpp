#include "rfsfusion/experiment.hpp"

#include "rfsfusion/errors.hpp"
#include "rfsfusion/gmb_approx.hpp"
#include "rfsfusion/serialization.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>

namespace rfs {

namespace {

using nlohmann::json;

struct MethodPlan {
    std::vector<int> local_nodes;   // 0-based node index per local method
    bool fogmb = false;
    bool sogmb = false;
};

MethodPlan parse_methods(const std::vector<std::string>& methods, std::size_t n_sensors) {
    if (methods.empty()) {
        throw InvalidParameterError("experiment needs at least one method");
    }
    MethodPlan plan;
    for (const std::string& m : methods) {
        if (m == "fogmb-fusion") {
            plan.fogmb = true;
        } else if (m == "sogmb-fusion") {
            plan.sogmb = true;
        } else if (m.rfind("local-node-", 0) == 0) {
            const int node = std::stoi(m.substr(11)) - 1;
            if (node < 0 || node >= static_cast<int>(n_sensors)) {
                throw InvalidParameterError("method '" + m + "' references a missing sensor");
            }
            plan.local_nodes.push_back(node);
        } else {
            throw InvalidParameterError("unknown method '" + m + "'");
        }
    }
    if ((plan.fogmb || plan.sogmb) && n_sensors < 2) {
        throw InvalidParameterError("fusion methods need at least two sensors");
    }
    return plan;
}

std::vector<Eigen::Vector2d> positions_of(const std::vector<Eigen::VectorXd>& states) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(states.size());
    for (const auto& s : states) out.emplace_back(s(0), s(1));
    return out;
}

std::vector<Eigen::Vector2d> truth_positions(const std::vector<TruthState>& truth) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(truth.size());
    for (const auto& t : truth) out.push_back(t.state.head<2>());
    return out;
}

void dump_density_file(const std::string& dir, const std::string& name,
                       const std::string& text) {
    std::ofstream out(dir + "/" + name);
    out << text;
}

} // namespace

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open experiment spec '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("experiment spec '" + path + "' is not valid JSON: " + e.what());
    }

    ExperimentSpec spec;
    if (!j.contains("scenario") || !j.at("scenario").is_string()) {
        throw SchemaError("experiment spec needs a 'scenario' path");
    }
    spec.scenario_path = j.at("scenario").get<std::string>();
    // Relative scenario paths resolve against the spec file's directory.
    const auto spec_dir = std::filesystem::path(path).parent_path();
    if (!spec_dir.empty() && std::filesystem::path(spec.scenario_path).is_relative()) {
        spec.scenario_path = (spec_dir / spec.scenario_path).string();
    }
    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty()) {
        throw SchemaError("experiment spec needs a nonempty 'methods' array");
    }
    for (const json& m : j.at("methods")) {
        spec.methods.push_back(m.get<std::string>());
    }
    spec.n_runs = j.value("runs", 1);
    if (spec.n_runs < 1) {
        throw SchemaError("experiment spec field 'runs' must be at least 1");
    }
    spec.base_seed = j.value("seed", 1ULL);
    spec.output_dir = j.value("output_dir", std::string("."));
    spec.threads = j.value("threads", 1);

    if (j.contains("filter")) {
        const json& f = j.at("filter");
        spec.filter.k_best = f.value("k_best", spec.filter.k_best);
        spec.filter.prune_threshold = f.value("prune_threshold", spec.filter.prune_threshold);
        spec.filter.max_components = f.value("max_components", spec.filter.max_components);
        spec.filter.gate_mahalanobis = f.value("gate", spec.filter.gate_mahalanobis);
    }
    if (j.contains("fusion")) {
        const json& f = j.at("fusion");
        const double w1 = f.value("omega1", 0.5);
        spec.fusion.weights = FusionWeights(w1, 1.0 - w1);
        spec.fusion.k_maps = f.value("k_maps", spec.fusion.k_maps);
        spec.fusion.weight_threshold = f.value("weight_threshold", spec.fusion.weight_threshold);
        spec.fusion.max_hypotheses = f.value("max_hypotheses", spec.fusion.max_hypotheses);
    }
    if (j.contains("sogmb")) {
        spec.sogmb.max_components_per_density =
            j.at("sogmb").value("max_components_per_density",
                                spec.sogmb.max_components_per_density);
    }
    if (j.contains("fogmb")) {
        const json& f = j.at("fogmb");
        spec.fogmb.max_components_per_density =
            f.value("max_components_per_density", spec.fogmb.max_components_per_density);
        spec.fogmb.existence_floor = f.value("existence_floor", spec.fogmb.existence_floor);
        spec.fogmb.max_bernoulli = f.value("max_bernoulli", spec.fogmb.max_bernoulli);
        spec.fogmb.max_hypotheses = f.value("max_hypotheses", spec.fogmb.max_hypotheses);
    }
    if (j.contains("dump_dir")) {
        spec.dump_dir = j.at("dump_dir").get<std::string>();
    }
    return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const ScenarioConfig& scenario) {
    validate_scenario(scenario);
    const MethodPlan plan = parse_methods(spec.methods, scenario.sensors.size());
    const auto truth = generate_truth(scenario);
    const std::size_t n_sensors = scenario.sensors.size();
    // Which nodes must run a filter.
    std::set<int> active_nodes(plan.local_nodes.begin(), plan.local_nodes.end());
    if (plan.fogmb || plan.sogmb) {
        for (std::size_t s = 0; s < n_sensors; ++s) active_nodes.insert(static_cast<int>(s));
    }

    if (spec.dump_dir) {
        std::filesystem::create_directories(*spec.dump_dir);
    }
    std::atomic<int> failed_runs{0};
    std::atomic<int> fallback_steps{0};
    std::mutex failure_mutex;
    std::vector<RunFailure> failures;

    auto run_one = [&](int run, std::uint64_t base_seed) -> RunScores {
        try {
            // Independent scan stream per (run, sensor).
            std::vector<std::vector<MeasurementScan>> scans(n_sensors);
            for (int node : active_nodes) {
                Rng rng = Rng::stream(base_seed, {static_cast<std::uint64_t>(run),
                                                  static_cast<std::uint64_t>(node)});
                auto& node_scans = scans[static_cast<std::size_t>(node)];
                node_scans.reserve(static_cast<std::size_t>(scenario.steps));
                for (int k = 1; k <= scenario.steps; ++k) {
                    node_scans.push_back(generate_scan(truth[static_cast<std::size_t>(k - 1)],
                                                       scenario.sensors[static_cast<std::size_t>(node)],
                                                       k, rng));
                }
            }

            // Local filters, shared by every method.
            std::vector<std::vector<GlmbDensity>> posteriors(n_sensors);
            for (int node : active_nodes) {
                GlmbDensity posterior;
                auto& history = posteriors[static_cast<std::size_t>(node)];
                history.reserve(static_cast<std::size_t>(scenario.steps));
                for (int k = 1; k <= scenario.steps; ++k) {
                    GlmbDensity predicted =
                        predict(posterior, scenario.motion, scenario.birth, k, spec.filter);
                    GlmbDensity updated = update(
                        predicted, scans[static_cast<std::size_t>(node)][static_cast<std::size_t>(k - 1)],
                        scenario.sensors[static_cast<std::size_t>(node)], spec.filter.k_best,
                        spec.filter);
                    posterior = prune(updated, spec.filter.prune_threshold,
                                      spec.filter.max_components);
                    history.push_back(posterior);
                }
            }

            const bool dump = spec.dump_dir && run == 0;
            RunScores scores;
            auto score_step = [&](const std::string& method, int k,
                                  const std::vector<Eigen::Vector2d>& estimate,
                                  std::size_t estimated_cardinality) {
                const auto& truth_k = truth[static_cast<std::size_t>(k - 1)];
                StepScore s;
                s.ospa = ospa(estimate, truth_positions(truth_k));
                s.estimated_cardinality = static_cast<double>(estimated_cardinality);
                s.true_cardinality = static_cast<double>(truth_k.size());
                scores[method].push_back(s);
            };

            for (int node : plan.local_nodes) {
                const std::string method = "local-node-" + std::to_string(node + 1);
                if (scores.count(method)) continue;   // method listed twice
                for (int k = 1; k <= scenario.steps; ++k) {
                    const LabeledEstimate est = extract_map(
                        posteriors[static_cast<std::size_t>(node)][static_cast<std::size_t>(k - 1)]);
                    score_step(method, k, positions_of(est.states), est.states.size());
                }
            }

            for (const bool second_order : {false, true}) {
                if (second_order ? !plan.sogmb : !plan.fogmb) continue;
                const std::string method = second_order ? "sogmb-fusion" : "fogmb-fusion";
                for (int k = 1; k <= scenario.steps; ++k) {
                    std::vector<SoGmbDensity> marginals;
                    marginals.reserve(n_sensors);
                    for (std::size_t node = 0; node < n_sensors; ++node) {
                        const GmbDensity unlabeled = strip_labels(
                            posteriors[node][static_cast<std::size_t>(k - 1)]);
                        marginals.push_back(second_order ? to_sogmb(unlabeled, spec.sogmb)
                                                         : to_fogmb(unlabeled, spec.fogmb));
                    }
                    GmbDensity fused;
                    try {
                        fused = fuse_sequential(marginals, spec.fusion, spec.sogmb);
                    } catch (const DegenerateFusionError&) {
                        // Posterior cardinality supports do not intersect at
                        // this step; keep the reference node's posterior.
                        fused = to_gmb(marginals.front());
                        fallback_steps.fetch_add(1);
                    }
                    const auto estimate = extract_map(fused);
                    score_step(method, k, positions_of(estimate), estimate.size());
                    if (dump) {
                        dump_density_file(*spec.dump_dir,
                                          method + "_step" + std::to_string(k) + ".txt",
                                          to_text(fused));
                    }
                }
            }

            if (dump) {
                for (int node : active_nodes) {
                    for (int k = 1; k <= scenario.steps; ++k) {
                        dump_density_file(
                            *spec.dump_dir,
                            "node" + std::to_string(node + 1) + "_step" + std::to_string(k) +
                                ".txt",
                            to_text(posteriors[static_cast<std::size_t>(node)]
                                              [static_cast<std::size_t>(k - 1)]));
                    }
                }
            }
            return scores;
        } catch (const Error& e) {
            failed_runs.fetch_add(1);
            {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                failures.push_back(RunFailure{run, e.what()});
            }
            return {};   // excluded run
        }
    };

    ExperimentResult result;
    result.statistics = monte_carlo(run_one, spec.n_runs, spec.base_seed, spec.threads);
    result.failed_runs = failed_runs.load();
    result.fusion_fallback_steps = fallback_steps.load();
    std::sort(failures.begin(), failures.end(),
              [](const RunFailure& a, const RunFailure& b) { return a.run < b.run; });
    result.failures = std::move(failures);

    std::filesystem::create_directories(spec.output_dir);
    result.statistics_csv_path =
        (std::filesystem::path(spec.output_dir) / (scenario.name + "_results.csv")).string();
    std::ofstream csv(result.statistics_csv_path);
    if (!csv) {
        throw SchemaError("cannot write results CSV '" + result.statistics_csv_path + "'");
    }
    write_statistics_csv(result.statistics, csv);
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    return run_experiment(spec, load_scenario(spec.scenario_path));
}

std::vector<std::string> emit_plotdata(const std::string& statistics_csv,
                                       const std::string& output_dir) {
    std::ifstream in(statistics_csv);
    if (!in) {
        throw SchemaError("cannot open statistics CSV '" + statistics_csv + "'");
    }
    const auto statistics = read_statistics_csv(in);
    std::filesystem::create_directories(output_dir);

    const std::filesystem::path dir(output_dir);
    std::vector<std::string> written;

    {
        std::ofstream os(dir / "cardinality_vs_time.csv");
        os << "step,method,mean_card,true_card\n";
        for (const auto& [method, stats] : statistics) {
            for (std::size_t k = 0; k < stats.mean_cardinality.size(); ++k) {
                os << (k + 1) << ',' << method << ',' << stats.mean_cardinality[k] << ','
                   << stats.true_cardinality[k] << '\n';
            }
        }
        written.push_back((dir / "cardinality_vs_time.csv").string());
    }
    {
        std::ofstream os(dir / "ospa_vs_time.csv");
        os << "step,method,mean_ospa\n";
        for (const auto& [method, stats] : statistics) {
            for (std::size_t k = 0; k < stats.mean_ospa.size(); ++k) {
                os << (k + 1) << ',' << method << ',' << stats.mean_ospa[k] << '\n';
            }
        }
        written.push_back((dir / "ospa_vs_time.csv").string());
    }
    {
        std::ofstream os(dir / "cardinality_std_band.csv");
        os << "step,method,mean_card,band_lo,band_hi\n";
        for (const auto& [method, stats] : statistics) {
            for (std::size_t k = 0; k < stats.mean_cardinality.size(); ++k) {
                const double mean = stats.mean_cardinality[k];
                const double std_dev = stats.std_cardinality[k];
                os << (k + 1) << ',' << method << ',' << mean << ',' << (mean - std_dev)
                   << ',' << (mean + std_dev) << '\n';
            }
        }
        written.push_back((dir / "cardinality_std_band.csv").string());
    }
    return written;
}

} // namespace rfs
