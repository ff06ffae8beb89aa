#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rfs {

/// OSPA parameters: cutoff c (meters) and order p >= 1.
struct OspaParams {
    double cutoff = 200.0;
    double order = 2.0;
};

/// Optimal sub-pattern assignment distance between two finite sets of
/// planar positions. Symmetric, bounded by the cutoff, zero for two empty
/// sets; the optimal assignment is solved exactly.
double ospa(const std::vector<Eigen::Vector2d>& x, const std::vector<Eigen::Vector2d>& y,
            const OspaParams& params = {});

/// Per-step tracking scores of one method in one run.
struct StepScore {
    double ospa = 0.0;
    double estimated_cardinality = 0.0;
    double true_cardinality = 0.0;
};

/// Per-run output: method name -> per-step scores.
using RunScores = std::map<std::string, std::vector<StepScore>>;

/// Per-step sample statistics of one method across runs.
struct MethodStatistics {
    std::vector<double> mean_ospa;
    std::vector<double> std_ospa;
    std::vector<double> mean_cardinality;
    std::vector<double> std_cardinality;
    std::vector<double> true_cardinality;
};

/// Run the seeded experiment procedure n_runs times (seed stream derived
/// from base_seed and the run index) and reduce to per-step mean and
/// (n-1)-normalized standard deviation per method. With a single run the
/// standard deviation is zero by convention. Runs may execute on up to
/// `threads` workers; results are aggregated in run order, so the output is
/// independent of the parallelism.
std::map<std::string, MethodStatistics> monte_carlo(
    const std::function<RunScores(int run, std::uint64_t base_seed)>& run_procedure,
    int n_runs, std::uint64_t base_seed, int threads = 1);

/// CSV with columns step,method,mean_ospa,std_ospa,mean_card,std_card,true_card.
void write_statistics_csv(const std::map<std::string, MethodStatistics>& statistics,
                          std::ostream& os);
std::map<std::string, MethodStatistics> read_statistics_csv(std::istream& is);

} // namespace rfs
