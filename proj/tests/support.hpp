#pragma once

#include <rfsfusion/assignment.hpp>
#include <rfsfusion/densities.hpp>
#include <rfsfusion/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <vector>

namespace rfs::test {

/// Midpoint-rule quadrature over [lo, hi]; effectively exact for smooth
/// integrands with negligible tails at the endpoints.
inline double quadrature(const std::function<double(double)>& f, double lo, double hi,
                         int points = 4000) {
    const double h = (hi - lo) / points;
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        sum += f(lo + (i + 0.5) * h);
    }
    return sum * h;
}

inline double quadrature2d(const std::function<double(double, double)>& f, double lo, double hi,
                           int points = 400) {
    const double h = (hi - lo) / points;
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        for (int j = 0; j < points; ++j) {
            sum += f(lo + (i + 0.5) * h, lo + (j + 0.5) * h);
        }
    }
    return sum * h * h;
}

/// Random normalized 1-D mixture with up to max_components components.
inline GaussianMixturePtr random_mixture_1d(Rng& rng, int max_components = 3,
                                            double mean_span = 4.0) {
    const int n = 1 + static_cast<int>(rng.uniform() * max_components);
    std::vector<WeightedGaussian> comps;
    double total = 0.0;
    std::vector<double> weights;
    for (int i = 0; i < n; ++i) {
        weights.push_back(0.1 + rng.uniform());
        total += weights.back();
    }
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd mean(1);
        mean << rng.uniform(-mean_span, mean_span);
        Eigen::MatrixXd cov(1, 1);
        cov << 0.3 + 2.0 * rng.uniform();
        comps.emplace_back(weights[static_cast<std::size_t>(i)] / total, mean, cov);
    }
    return make_mixture(std::move(comps));
}

/// Random GMB over 1-D densities: every subset of a random index set gets a
/// few history variants with random weights.
inline GmbDensity random_gmb_1d(Rng& rng, int max_indices = 4, int max_histories = 3,
                                int max_gaussians = 3) {
    const int n_idx = 1 + static_cast<int>(rng.uniform() * max_indices);
    std::vector<int> index_set;
    for (int i = 0; i < n_idx; ++i) index_set.push_back(i);

    std::vector<GmbHypothesis> hypotheses;
    double total = 0.0;
    const int n_subsets = 1 << n_idx;
    for (int mask = 0; mask < n_subsets; ++mask) {
        if (rng.uniform() < 0.3 && mask != 0) continue;   // skip some subsets
        const int histories = 1 + static_cast<int>(rng.uniform() * max_histories);
        for (int phi = 0; phi < histories; ++phi) {
            GmbHypothesis h;
            h.phi = phi;
            h.weight = 0.05 + rng.uniform();
            for (int i = 0; i < n_idx; ++i) {
                if (mask & (1 << i)) {
                    h.indices.push_back(i);
                    h.densities[i] = random_mixture_1d(rng, max_gaussians);
                }
            }
            total += h.weight;
            hypotheses.push_back(std::move(h));
        }
    }
    for (auto& h : hypotheses) h.weight /= total;
    // Absorb rounding into the heaviest hypothesis so weights sum to one.
    double sum = 0.0;
    for (const auto& h : hypotheses) sum += h.weight;
    hypotheses.front().weight += 1.0 - sum;
    return GmbDensity(std::move(index_set), std::move(hypotheses));
}

/// Every complete row assignment (each row a distinct column) with finite
/// cost, sorted by cost. Brute-force oracle for the ranked-assignment solver.
inline std::vector<Assignment> enumerate_assignments(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    std::vector<Assignment> all;
    std::vector<int> current(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    auto recurse = [&](auto&& self, int row, double acc) -> void {
        if (row == n) {
            all.push_back(Assignment{current, acc});
            return;
        }
        for (int c = 0; c < m; ++c) {
            if (used[static_cast<std::size_t>(c)]) continue;
            const double v = cost(row, c);
            if (!std::isfinite(v)) continue;
            used[static_cast<std::size_t>(c)] = true;
            current[static_cast<std::size_t>(row)] = c;
            self(self, row + 1, acc + v);
            used[static_cast<std::size_t>(c)] = false;
        }
    };
    recurse(recurse, 0, 0.0);
    std::stable_sort(all.begin(), all.end(),
                     [](const Assignment& a, const Assignment& b) { return a.cost < b.cost; });
    return all;
}

} // namespace rfs::test
