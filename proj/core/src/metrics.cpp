#include "rfsfusion/metrics.hpp"

#include "rfsfusion/assignment.hpp"
#include "rfsfusion/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

namespace rfs {

double ospa(const std::vector<Eigen::Vector2d>& x, const std::vector<Eigen::Vector2d>& y,
            const OspaParams& params) {
    if (params.cutoff <= 0.0 || params.order < 1.0) {
        throw InvalidParameterError("OSPA needs cutoff > 0 and order >= 1");
    }
    const auto& small = x.size() <= y.size() ? x : y;
    const auto& large = x.size() <= y.size() ? y : x;
    const std::size_t m = small.size();
    const std::size_t n = large.size();
    if (n == 0) {
        return 0.0;   // both empty
    }
    double total = std::pow(params.cutoff, params.order) * static_cast<double>(n - m);
    if (m > 0) {
        Eigen::MatrixXd cost(m, n);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double d = std::min((small[i] - large[j]).norm(), params.cutoff);
                cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::pow(d, params.order);
            }
        }
        const auto assignment = solve_assignment(cost);
        total += assignment->cost;
    }
    return std::pow(total / static_cast<double>(n), 1.0 / params.order);
}

std::map<std::string, MethodStatistics> monte_carlo(
    const std::function<RunScores(int run, std::uint64_t base_seed)>& run_procedure,
    int n_runs, std::uint64_t base_seed, int threads) {
    if (n_runs < 1) {
        throw InvalidParameterError("n_runs must be at least 1");
    }
    std::vector<RunScores> results(static_cast<std::size_t>(n_runs));
    if (threads <= 1) {
        for (int r = 0; r < n_runs; ++r) {
            results[static_cast<std::size_t>(r)] = run_procedure(r, base_seed);
        }
    } else {
        std::vector<std::future<void>> workers;
        std::atomic<int> next{0};
        const int worker_count = std::min(threads, n_runs);
        for (int w = 0; w < worker_count; ++w) {
            workers.push_back(std::async(std::launch::async, [&]() {
                for (int r = next.fetch_add(1); r < n_runs; r = next.fetch_add(1)) {
                    results[static_cast<std::size_t>(r)] = run_procedure(r, base_seed);
                }
            }));
        }
        for (auto& worker : workers) worker.get();
    }

    // An empty RunScores marks an excluded run (e.g. filter divergence);
    // reduce over the remaining ones in run order.
    std::erase_if(results, [](const RunScores& r) { return r.empty(); });
    if (results.empty()) {
        throw Error("all Monte Carlo runs were excluded");
    }
    const int effective_runs = static_cast<int>(results.size());

    std::map<std::string, MethodStatistics> statistics;
    for (const auto& [method, steps] : results.front()) {
        const std::size_t n_steps = steps.size();
        MethodStatistics stats;
        stats.mean_ospa.assign(n_steps, 0.0);
        stats.std_ospa.assign(n_steps, 0.0);
        stats.mean_cardinality.assign(n_steps, 0.0);
        stats.std_cardinality.assign(n_steps, 0.0);
        stats.true_cardinality.assign(n_steps, 0.0);

        for (std::size_t k = 0; k < n_steps; ++k) {
            double sum_o = 0.0;
            double sum_c = 0.0;
            for (const auto& run : results) {
                const StepScore& s = run.at(method).at(k);
                sum_o += s.ospa;
                sum_c += s.estimated_cardinality;
            }
            const double mean_o = sum_o / effective_runs;
            const double mean_c = sum_c / effective_runs;
            double ss_o = 0.0;
            double ss_c = 0.0;
            for (const auto& run : results) {
                const StepScore& s = run.at(method).at(k);
                ss_o += (s.ospa - mean_o) * (s.ospa - mean_o);
                ss_c += (s.estimated_cardinality - mean_c) * (s.estimated_cardinality - mean_c);
            }
            stats.mean_ospa[k] = mean_o;
            stats.mean_cardinality[k] = mean_c;
            stats.true_cardinality[k] = results.front().at(method).at(k).true_cardinality;
            if (effective_runs > 1) {
                stats.std_ospa[k] = std::sqrt(ss_o / (effective_runs - 1));
                stats.std_cardinality[k] = std::sqrt(ss_c / (effective_runs - 1));
            }
        }
        statistics[method] = std::move(stats);
    }
    return statistics;
}

void write_statistics_csv(const std::map<std::string, MethodStatistics>& statistics,
                          std::ostream& os) {
    os << "step,method,mean_ospa,std_ospa,mean_card,std_card,true_card\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    for (const auto& [method, stats] : statistics) {
        for (std::size_t k = 0; k < stats.mean_ospa.size(); ++k) {
            os << (k + 1) << ',' << method << ',' << num(stats.mean_ospa[k]) << ','
               << num(stats.std_ospa[k]) << ',' << num(stats.mean_cardinality[k]) << ','
               << num(stats.std_cardinality[k]) << ',' << num(stats.true_cardinality[k])
               << '\n';
        }
    }
}

std::map<std::string, MethodStatistics> read_statistics_csv(std::istream& is) {
    std::map<std::string, MethodStatistics> statistics;
    std::string line;
    if (!std::getline(is, line)) {
        throw SchemaError("statistics CSV is empty");
    }
    if (line != "step,method,mean_ospa,std_ospa,mean_card,std_card,true_card") {
        throw SchemaError("statistics CSV has an unexpected header: " + line);
    }
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7) {
            throw SchemaError("statistics CSV line " + std::to_string(line_no) +
                              ": expected 7 fields");
        }
        try {
            const std::size_t step = std::stoul(fields[0]);
            MethodStatistics& stats = statistics[fields[1]];
            auto put = [&](std::vector<double>& v, const std::string& s) {
                if (v.size() < step) v.resize(step, 0.0);
                v[step - 1] = std::stod(s);
            };
            put(stats.mean_ospa, fields[2]);
            put(stats.std_ospa, fields[3]);
            put(stats.mean_cardinality, fields[4]);
            put(stats.std_cardinality, fields[5]);
            put(stats.true_cardinality, fields[6]);
        } catch (const std::exception&) {
            throw SchemaError("statistics CSV line " + std::to_string(line_no) +
                              ": malformed number");
        }
    }
    return statistics;
}

} // namespace rfs
