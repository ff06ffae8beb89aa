#include "rfsfusion/gmb_approx.hpp"

#include "rfsfusion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace rfs {

GmbDensity strip_labels(const GlmbDensity& g) {
    // Fixed bijection: sorted label order over the whole density.
    const std::vector<Label> labels = g.label_union();
    std::map<Label, int> to_index;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        to_index[labels[i]] = static_cast<int>(i);
    }
    std::vector<int> index_set;
    index_set.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        index_set.push_back(static_cast<int>(i));
    }

    std::vector<GmbHypothesis> hypotheses;
    hypotheses.reserve(g.components().size());
    for (const auto& c : g.components()) {
        GmbHypothesis h;
        h.phi = c.history;
        h.weight = c.weight;
        for (const Label& l : c.labels) {
            const int idx = to_index.at(l);
            h.indices.push_back(idx);
            h.densities[idx] = c.tracks.at(l);
        }
        std::sort(h.indices.begin(), h.indices.end());
        if (std::adjacent_find(h.indices.begin(), h.indices.end()) != h.indices.end()) {
            throw InvalidDensityError("GLMB component carries duplicate labels");
        }
        hypotheses.push_back(std::move(h));
    }
    return GmbDensity(std::move(index_set), std::move(hypotheses));
}

SoGmbDensity to_sogmb(const GmbDensity& g, const SogmbOptions& options,
                      ApproxDiagnostics* diagnostics) {
    // Group hypotheses by index set, summing weights over phi.
    std::map<std::vector<int>, std::vector<const GmbHypothesis*>> groups;
    for (const auto& h : g.hypotheses()) {
        groups[h.indices].push_back(&h);
    }

    std::vector<SoGmbHypothesis> hypotheses;
    hypotheses.reserve(groups.size());
    for (const auto& [indices, members] : groups) {
        double total = 0.0;
        for (const auto* h : members) total += h->weight;
        if (total <= 0.0) {
            if (!indices.empty() && diagnostics != nullptr) {
                ++diagnostics->dropped_zero_weight_hypotheses;
            }
            continue;
        }
        SoGmbHypothesis out;
        out.indices = indices;
        out.weight = total;
        for (int i : indices) {
            // Singleton groups keep their density object; downstream fusion
            // caches cross terms by pointer identity.
            if (members.size() == 1) {
                out.densities[i] = members.front()->densities.at(i);
                continue;
            }
            std::vector<WeightedGaussian> mix;
            for (const auto* h : members) {
                const double share = h->weight / total;
                if (share <= 0.0) continue;
                for (const auto& comp : h->densities.at(i)->components()) {
                    mix.push_back(comp.with_weight(share * comp.weight()));
                }
            }
            GaussianMixture merged(std::move(mix));
            out.densities[i] = std::make_shared<const GaussianMixture>(
                reduce_mixture(merged, options.max_components_per_density));
        }
        hypotheses.push_back(std::move(out));
    }
    return SoGmbDensity(g.index_set(), std::move(hypotheses));
}

SoGmbDensity to_fogmb(const GmbDensity& g, const FogmbOptions& options) {
    // Marginal existence and existence-weighted density per index.
    struct Bernoulli {
        int index;
        double r;
        GaussianMixturePtr density;
    };
    std::vector<Bernoulli> bernoullis;
    for (int i : g.index_set()) {
        double r = 0.0;
        std::vector<WeightedGaussian> mix;
        for (const auto& h : g.hypotheses()) {
            if (!std::binary_search(h.indices.begin(), h.indices.end(), i)) continue;
            r += h.weight;
            if (h.weight <= 0.0) continue;
            for (const auto& comp : h.densities.at(i)->components()) {
                mix.push_back(comp.with_weight(h.weight * comp.weight()));
            }
        }
        if (r > 1.0 + 1e-9) {
            throw InvalidDensityError("marginal existence exceeds one for index " +
                                      std::to_string(i));
        }
        if (r <= 0.0 || r < options.existence_floor) continue;
        r = std::min(r, 1.0);
        GaussianMixture density(std::move(mix));
        bernoullis.push_back(Bernoulli{
            i, r,
            std::make_shared<const GaussianMixture>(reduce_mixture(
                density.normalized(), options.max_components_per_density))});
    }

    if (options.max_bernoulli > 0 && bernoullis.size() > options.max_bernoulli) {
        std::stable_sort(bernoullis.begin(), bernoullis.end(),
                         [](const Bernoulli& a, const Bernoulli& b) { return a.r > b.r; });
        bernoullis.resize(options.max_bernoulli);
        std::stable_sort(bernoullis.begin(), bernoullis.end(),
                         [](const Bernoulli& a, const Bernoulli& b) { return a.index < b.index; });
    }

    // Expand the multi-Bernoulli into hypothesis form. Depth-first with a
    // branch bound: a partial subset is abandoned once even its best
    // completion falls far below the most probable subset.
    const std::size_t n_bern = bernoullis.size();
    std::vector<double> log_r(n_bern), log_q(n_bern), suffix_best(n_bern + 1, 0.0);
    for (std::size_t i = 0; i < n_bern; ++i) {
        log_r[i] = std::log(bernoullis[i].r);
        log_q[i] = bernoullis[i].r < 1.0 ? std::log1p(-bernoullis[i].r)
                                         : -std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = n_bern; i-- > 0;) {
        suffix_best[i] = suffix_best[i + 1] + std::max(log_r[i], log_q[i]);
    }
    const double log_cut = suffix_best[0] + std::log(1e-12);

    struct Partial {
        double log_weight;
        std::vector<int> indices;
    };
    std::vector<Partial> subsets;
    std::vector<int> chosen;
    auto expand = [&](auto&& self, std::size_t depth, double log_weight) -> void {
        if (!std::isfinite(log_weight) || log_weight + suffix_best[depth] < log_cut) {
            return;
        }
        if (depth == n_bern) {
            subsets.push_back(Partial{log_weight, chosen});
            return;
        }
        self(self, depth + 1, log_weight + log_q[depth]);
        chosen.push_back(static_cast<int>(depth));
        self(self, depth + 1, log_weight + log_r[depth]);
        chosen.pop_back();
    };
    expand(expand, 0, 0.0);

    std::vector<SoGmbHypothesis> hypotheses;
    hypotheses.reserve(subsets.size());
    for (auto& s : subsets) {
        SoGmbHypothesis h;
        h.weight = std::exp(s.log_weight);
        for (int slot : s.indices) {
            const Bernoulli& b = bernoullis[static_cast<std::size_t>(slot)];
            h.indices.push_back(b.index);
            h.densities[b.index] = b.density;
        }
        hypotheses.push_back(std::move(h));
    }
    std::stable_sort(hypotheses.begin(), hypotheses.end(),
                     [](const SoGmbHypothesis& a, const SoGmbHypothesis& b) {
                         return a.weight > b.weight;
                     });
    if (options.max_hypotheses > 0 && hypotheses.size() > options.max_hypotheses) {
        hypotheses.resize(options.max_hypotheses);
    }
    double total = 0.0;
    for (const auto& h : hypotheses) total += h.weight;
    if (total <= 0.0) {
        throw InvalidDensityError("multi-Bernoulli expansion has zero total weight");
    }
    for (auto& h : hypotheses) h.weight /= total;
    return SoGmbDensity(g.index_set(), std::move(hypotheses));
}

GmbDensity to_gmb(const SoGmbDensity& d) {
    std::vector<GmbHypothesis> hypotheses;
    hypotheses.reserve(d.hypotheses().size());
    int phi = 0;
    for (const auto& h : d.hypotheses()) {
        GmbHypothesis out;
        out.indices = h.indices;
        out.phi = phi++;
        out.weight = h.weight;
        out.densities = h.densities;
        hypotheses.push_back(std::move(out));
    }
    return GmbDensity(d.index_set(), std::move(hypotheses));
}

} // namespace rfs
