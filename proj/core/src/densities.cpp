#include "rfsfusion/densities.hpp"

#include "rfsfusion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace rfs {

namespace {

constexpr double kWeightTol = 1e-9;

template <typename Hypothesis>
void sort_by_weight(std::vector<Hypothesis>& hs) {
    std::stable_sort(hs.begin(), hs.end(), [](const Hypothesis& a, const Hypothesis& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.indices < b.indices;
    });
}

template <typename Hypothesis>
void check_hypothesis(const Hypothesis& h) {
    if (!std::is_sorted(h.indices.begin(), h.indices.end()) ||
        std::adjacent_find(h.indices.begin(), h.indices.end()) != h.indices.end()) {
        throw InvalidDensityError("hypothesis index set must be sorted and distinct");
    }
    if (h.weight < 0.0 || !std::isfinite(h.weight)) {
        throw InvalidDensityError("hypothesis weight must be finite and nonnegative");
    }
    for (int i : h.indices) {
        auto it = h.densities.find(i);
        if (it == h.densities.end() || !it->second) {
            throw InvalidDensityError("hypothesis is missing a density for index " +
                                      std::to_string(i));
        }
        if (!it->second->is_normalized(kWeightTol)) {
            throw InvalidDensityError("spatial density for index " + std::to_string(i) +
                                      " is not normalized");
        }
    }
}

template <typename Hypothesis>
void check_total_weight(const std::vector<Hypothesis>& hs) {
    double total = 0.0;
    for (const auto& h : hs) total += h.weight;
    if (std::abs(total - 1.0) > kWeightTol) {
        throw InvalidDensityError("hypothesis weights sum to " + std::to_string(total) +
                                  ", expected 1");
    }
}

template <typename Hypothesis>
CardinalityDistribution cardinality_of(const std::vector<Hypothesis>& hs) {
    std::size_t n_max = 0;
    for (const auto& h : hs) n_max = std::max(n_max, h.indices.size());
    std::vector<double> rho(n_max + 1, 0.0);
    for (const auto& h : hs) rho[h.indices.size()] += h.weight;
    return CardinalityDistribution(std::move(rho));
}

template <typename Hypothesis>
double phd_of(const std::vector<Hypothesis>& hs, const Eigen::VectorXd& x) {
    double v = 0.0;
    for (const auto& h : hs) {
        if (h.weight == 0.0) continue;
        double sum = 0.0;
        for (int i : h.indices) {
            sum += h.densities.at(i)->evaluate(x);
        }
        v += h.weight * sum;
    }
    return v;
}

} // namespace

CardinalityDistribution::CardinalityDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
    double total = 0.0;
    for (double p : probabilities_) {
        if (p < 0.0 || !std::isfinite(p)) {
            throw InvalidDensityError("cardinality probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (probabilities_.empty() || std::abs(total - 1.0) > kWeightTol) {
        throw InvalidDensityError("cardinality distribution must sum to 1");
    }
}

std::size_t CardinalityDistribution::map_estimate() const {
    std::size_t best = 0;
    for (std::size_t n = 1; n < probabilities_.size(); ++n) {
        if (probabilities_[n] > probabilities_[best]) best = n;
    }
    return best;
}

double CardinalityDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < probabilities_.size(); ++n) {
        m += static_cast<double>(n) * probabilities_[n];
    }
    return m;
}

GlmbDensity::GlmbDensity(std::vector<GlmbComponent> components)
    : components_(std::move(components)) {
    double total = 0.0;
    for (const auto& c : components_) {
        if (!std::is_sorted(c.labels.begin(), c.labels.end()) ||
            std::adjacent_find(c.labels.begin(), c.labels.end()) != c.labels.end()) {
            throw InvalidDensityError("component labels must be sorted and distinct");
        }
        if (c.weight < 0.0 || !std::isfinite(c.weight)) {
            throw InvalidDensityError("component weight must be finite and nonnegative");
        }
        for (const Label& l : c.labels) {
            auto it = c.tracks.find(l);
            if (it == c.tracks.end() || !it->second) {
                throw InvalidDensityError("component is missing a track density for label " +
                                          to_string(l));
            }
            if (!it->second->is_normalized(kWeightTol)) {
                throw InvalidDensityError("track density for label " + to_string(l) +
                                          " is not normalized");
            }
        }
        total += c.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol) {
        throw InvalidDensityError("GLMB weights sum to " + std::to_string(total) +
                                  ", expected 1");
    }
    std::stable_sort(components_.begin(), components_.end(),
                     [](const GlmbComponent& a, const GlmbComponent& b) {
                         if (a.weight != b.weight) return a.weight > b.weight;
                         return a.labels < b.labels;
                     });
}

CardinalityDistribution GlmbDensity::cardinality() const {
    std::size_t n_max = 0;
    for (const auto& c : components_) n_max = std::max(n_max, c.labels.size());
    std::vector<double> rho(n_max + 1, 0.0);
    for (const auto& c : components_) rho[c.labels.size()] += c.weight;
    return CardinalityDistribution(std::move(rho));
}

std::vector<Label> GlmbDensity::label_union() const {
    std::set<Label> all;
    for (const auto& c : components_) {
        all.insert(c.labels.begin(), c.labels.end());
    }
    return {all.begin(), all.end()};
}

GmbDensity::GmbDensity(std::vector<int> index_set, std::vector<GmbHypothesis> hypotheses)
    : index_set_(std::move(index_set)), hypotheses_(std::move(hypotheses)) {
    std::sort(index_set_.begin(), index_set_.end());
    for (const auto& h : hypotheses_) {
        check_hypothesis(h);
        for (int i : h.indices) {
            if (!std::binary_search(index_set_.begin(), index_set_.end(), i)) {
                throw InvalidDensityError("hypothesis references index outside the index set");
            }
        }
    }
    check_total_weight(hypotheses_);
    sort_by_weight(hypotheses_);
}

SoGmbDensity::SoGmbDensity(std::vector<int> index_set, std::vector<SoGmbHypothesis> hypotheses)
    : index_set_(std::move(index_set)), hypotheses_(std::move(hypotheses)) {
    std::sort(index_set_.begin(), index_set_.end());
    for (const auto& h : hypotheses_) {
        check_hypothesis(h);
        for (int i : h.indices) {
            if (!std::binary_search(index_set_.begin(), index_set_.end(), i)) {
                throw InvalidDensityError("hypothesis references index outside the index set");
            }
        }
    }
    check_total_weight(hypotheses_);
    sort_by_weight(hypotheses_);
}

CardinalityDistribution gmb_cardinality(const GmbDensity& d) {
    return cardinality_of(d.hypotheses());
}

CardinalityDistribution sogmb_cardinality(const SoGmbDensity& d) {
    return cardinality_of(d.hypotheses());
}

double gmb_phd(const GmbDensity& d, const Eigen::VectorXd& x) {
    return phd_of(d.hypotheses(), x);
}

double sogmb_phd(const SoGmbDensity& d, const Eigen::VectorXd& x) {
    return phd_of(d.hypotheses(), x);
}

std::vector<Eigen::VectorXd> extract_map(const GmbDensity& d) {
    if (d.empty()) return {};
    const std::size_t n_star = gmb_cardinality(d).map_estimate();
    if (n_star == 0) return {};
    // Hypotheses are sorted by descending weight; take the first with |I| = n*.
    for (const auto& h : d.hypotheses()) {
        if (h.indices.size() != n_star) continue;
        std::vector<Eigen::VectorXd> states;
        states.reserve(n_star);
        for (int i : h.indices) {
            states.push_back(moment_match(*h.densities.at(i)).mean());
        }
        return states;
    }
    return {};
}

} // namespace rfs
