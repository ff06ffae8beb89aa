#include "rfsfusion/gci_fusion.hpp"

#include "rfsfusion/assignment.hpp"
#include "rfsfusion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace rfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& logs) {
    double m = -kInf;
    for (double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s);
}

std::string index_set_to_string(const std::vector<int>& indices) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) os << ',';
        os << indices[i];
    }
    os << '}';
    return os.str();
}

/// Cross terms are computed once per ordered density pair; hypothesis pairs
/// frequently share densities (always, for multi-Bernoulli inputs).
class CrossTermCache {
public:
    CrossTermCache(const FusionWeights& weights) : weights_(weights) {}

    const CrossTerm& get(const GaussianMixturePtr& p1, const GaussianMixturePtr& p2) {
        const Key key{p1.get(), p2.get()};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        CrossTerm term = fusion_cross_term(*p1, *p2, weights_.first(), weights_.second());
        return cache_.emplace(key, std::move(term)).first->second;
    }

private:
    struct Key {
        const GaussianMixture* a;
        const GaussianMixture* b;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            return std::hash<const void*>()(k.a) * 31 ^ std::hash<const void*>()(k.b);
        }
    };
    FusionWeights weights_;
    std::unordered_map<Key, CrossTerm, KeyHash> cache_;
};

struct ScoredFusedHypothesis {
    double log_weight;
    GmbHypothesis hypothesis;
};

/// A ranked map together with the partner hypothesis it maps into; the
/// partner is needed because densities are hypothesis-conditional.
struct RankedMap {
    FusionMap map;
    double log_weight;
    const SoGmbHypothesis* partner;
};

/// Ranked fusion maps for one (reference hypothesis, partner hypothesis)
/// pair: Murty over the n x n bijection cost matrix.
void rank_pair(const SoGmbHypothesis& ha, const SoGmbHypothesis& hb,
               const FusionWeights& weights, int k, CrossTermCache& cache,
               std::vector<RankedMap>& out) {
    const std::size_t n = ha.indices.size();
    if (hb.indices.size() != n || ha.weight <= 0.0 || hb.weight <= 0.0) {
        return;
    }
    const double log_hyp = weights.first() * std::log(ha.weight) +
                           weights.second() * std::log(hb.weight);
    if (n == 0) {
        out.push_back(RankedMap{FusionMap{{}, {}}, log_hyp, &hb});
        return;
    }
    Eigen::MatrixXd cost(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                -cache.get(ha.densities.at(ha.indices[i]), hb.densities.at(hb.indices[j]))
                     .log_eta;
        }
    }
    for (const Assignment& assignment : murty(cost, k)) {
        FusionMap map;
        map.domain = ha.indices;
        map.image.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            map.image[i] = hb.indices[static_cast<std::size_t>(
                assignment.row_to_col[i])];
        }
        out.push_back(RankedMap{std::move(map), log_hyp - assignment.cost, &hb});
    }
}

void sort_ranked(std::vector<RankedMap>& maps) {
    std::stable_sort(maps.begin(), maps.end(), [](const RankedMap& x, const RankedMap& y) {
        return x.log_weight > y.log_weight;
    });
}

} // namespace

FusionWeights::FusionWeights(double w1, double w2) : w1_(w1), w2_(w2) {
    if (!(w1 > 0.0) || !(w1 < 1.0) || std::abs(w1 + w2 - 1.0) > 1e-12) {
        throw InvalidParameterError("fusion weights must lie in (0,1) and sum to 1");
    }
}

std::vector<FusionMap> enumerate_fusion_maps(const std::vector<int>& domain,
                                             const std::vector<int>& codomain) {
    std::vector<FusionMap> maps;
    if (domain.size() > codomain.size()) {
        return maps;   // unmatched cardinality, no feasible maps
    }
    std::vector<int> image;
    std::vector<bool> used(codomain.size(), false);
    auto recurse = [&](auto&& self, std::size_t depth) -> void {
        if (depth == domain.size()) {
            maps.push_back(FusionMap{domain, image});
            return;
        }
        for (std::size_t j = 0; j < codomain.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            image.push_back(codomain[j]);
            self(self, depth + 1);
            image.pop_back();
            used[j] = false;
        }
    };
    recurse(recurse, 0);
    return maps;
}

std::vector<ScoredFusionMap> k_best_fusion_maps(const std::vector<int>& domain,
                                                const SoGmbDensity& a, const SoGmbDensity& b,
                                                const FusionWeights& weights, int k) {
    if (k < 1) {
        throw InvalidParameterError("k must be at least 1");
    }
    const SoGmbHypothesis* ha = nullptr;
    for (const auto& h : a.hypotheses()) {
        if (h.indices == domain) {
            ha = &h;
            break;
        }
    }
    if (ha == nullptr) {
        return {};   // domain is not a hypothesis of the reference node
    }
    CrossTermCache cache(weights);
    std::vector<RankedMap> ranked;
    for (const auto& hb : b.hypotheses()) {
        rank_pair(*ha, hb, weights, k, cache, ranked);
    }
    sort_ranked(ranked);
    if (static_cast<int>(ranked.size()) > k) {
        ranked.resize(static_cast<std::size_t>(k));
    }
    std::vector<ScoredFusionMap> out;
    out.reserve(ranked.size());
    for (auto& r : ranked) {
        out.push_back(ScoredFusionMap{std::move(r.map), r.log_weight});
    }
    return out;
}

GmbDensity fuse_pair(const SoGmbDensity& a, const SoGmbDensity& b,
                     const FusionParams& params) {
    if (params.k_maps < 1 || params.max_hypotheses < 1) {
        throw InvalidParameterError("fusion truncation parameters must be at least 1");
    }
    CrossTermCache cache(params.weights);

    std::vector<ScoredFusedHypothesis> fused;
    int next_phi = 0;
    for (const auto& ha : a.hypotheses()) {
        std::vector<RankedMap> maps;
        for (const auto& hb : b.hypotheses()) {
            rank_pair(ha, hb, params.weights, params.k_maps, cache, maps);
        }
        sort_ranked(maps);
        if (static_cast<int>(maps.size()) > params.k_maps) {
            maps.resize(static_cast<std::size_t>(params.k_maps));
        }
        for (const auto& ranked : maps) {
            GmbHypothesis h;
            h.indices = ranked.map.domain;
            h.phi = next_phi++;
            for (std::size_t i = 0; i < ranked.map.domain.size(); ++i) {
                const int idx = ranked.map.domain[i];
                const int partner_idx = ranked.map.image[i];
                const CrossTerm& term = cache.get(ha.densities.at(idx),
                                                  ranked.partner->densities.at(partner_idx));
                h.densities[idx] =
                    std::make_shared<const GaussianMixture>(term.fused);
            }
            fused.push_back(ScoredFusedHypothesis{ranked.log_weight, std::move(h)});
        }
    }

    if (fused.empty()) {
        const std::string offender = a.hypotheses().empty()
                                         ? std::string("<empty density>")
                                         : index_set_to_string(a.hypotheses().front().indices);
        throw DegenerateFusionError("fusion produced no hypothesis with positive weight; "
                                    "first reference hypothesis " + offender);
    }

    std::stable_sort(fused.begin(), fused.end(),
                     [](const ScoredFusedHypothesis& x, const ScoredFusedHypothesis& y) {
                         return x.log_weight > y.log_weight;
                     });
    if (static_cast<int>(fused.size()) > params.max_hypotheses) {
        fused.resize(static_cast<std::size_t>(params.max_hypotheses));
    }
    std::vector<double> logs;
    logs.reserve(fused.size());
    for (const auto& f : fused) logs.push_back(f.log_weight);
    const double log_total = log_sum_exp(logs);
    if (!std::isfinite(log_total)) {
        throw DegenerateFusionError("fused hypothesis weights underflowed to zero");
    }

    std::vector<GmbHypothesis> hypotheses;
    double kept_total = 0.0;
    for (auto& f : fused) {
        const double w = std::exp(f.log_weight - log_total);
        if (w < params.weight_threshold && !hypotheses.empty()) continue;
        f.hypothesis.weight = w;
        kept_total += w;
        hypotheses.push_back(std::move(f.hypothesis));
    }
    for (auto& h : hypotheses) h.weight /= kept_total;
    return GmbDensity(a.index_set(), std::move(hypotheses));
}

GmbDensity fuse_sequential(const std::vector<SoGmbDensity>& posteriors,
                           const FusionParams& params, const SogmbOptions& sogmb_options) {
    if (posteriors.size() < 2) {
        throw InvalidParameterError("sequential fusion needs at least two posteriors");
    }
    SoGmbDensity current = posteriors.front();
    GmbDensity fused;
    for (std::size_t i = 1; i < posteriors.size(); ++i) {
        try {
            fused = fuse_pair(current, posteriors[i], params);
        } catch (const Error& e) {
            throw DegenerateFusionError("fusing posterior " + std::to_string(i) + ": " +
                                        e.what());
        }
        if (i + 1 < posteriors.size()) {
            current = to_sogmb(fused, sogmb_options);
        }
    }
    return fused;
}

} // namespace rfs
