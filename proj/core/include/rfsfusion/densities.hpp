#pragma once

#include "rfsfusion/gaussian.hpp"
#include "rfsfusion/labels.hpp"

#include <Eigen/Dense>

#include <map>
#include <vector>

namespace rfs {

/// Probability mass function over target count n = 0, 1, 2, ...
class CardinalityDistribution {
public:
    CardinalityDistribution() = default;
    explicit CardinalityDistribution(std::vector<double> probabilities);

    [[nodiscard]] const std::vector<double>& probabilities() const { return probabilities_; }
    [[nodiscard]] double operator()(std::size_t n) const {
        return n < probabilities_.size() ? probabilities_[n] : 0.0;
    }
    [[nodiscard]] std::size_t max_cardinality() const {
        return probabilities_.empty() ? 0 : probabilities_.size() - 1;
    }

    /// Most probable count (smallest n on ties).
    [[nodiscard]] std::size_t map_estimate() const;

    /// Expected count.
    [[nodiscard]] double mean() const;

private:
    std::vector<double> probabilities_;
};

// ---------------------------------------------------------------------------
// Labeled multi-object posterior
// ---------------------------------------------------------------------------

/// One delta-GLMB component: a label set, an opaque association-history
/// index, a weight, and one spatial density per label.
struct GlmbComponent {
    std::vector<Label> labels;                      // sorted, distinct
    int history = 0;                                // opaque index into the history space
    double weight = 0.0;
    std::map<Label, GaussianMixturePtr> tracks;     // label -> normalized density
};

/// Labeled multi-object density in delta form: every mixture component
/// carries an explicit label set. Components are kept sorted by descending
/// weight; weights sum to one.
class GlmbDensity {
public:
    GlmbDensity() = default;
    explicit GlmbDensity(std::vector<GlmbComponent> components);

    [[nodiscard]] const std::vector<GlmbComponent>& components() const { return components_; }
    [[nodiscard]] bool empty() const { return components_.empty(); }

    [[nodiscard]] CardinalityDistribution cardinality() const;

    /// Union of the labels appearing in any component.
    [[nodiscard]] std::vector<Label> label_union() const;

private:
    std::vector<GlmbComponent> components_;
};

// ---------------------------------------------------------------------------
// Unlabeled multi-object posteriors
// ---------------------------------------------------------------------------

/// One GMB hypothesis: an index set, an association-history index phi, a
/// weight, and the spatial densities this hypothesis references.
struct GmbHypothesis {
    std::vector<int> indices;                       // sorted index set
    int phi = 0;
    double weight = 0.0;
    std::map<int, GaussianMixturePtr> densities;    // index -> normalized density
};

/// Unlabeled counterpart of a GLMB: a mixture over (index set, history)
/// hypotheses with per-index spatial densities.
class GmbDensity {
public:
    GmbDensity() = default;
    GmbDensity(std::vector<int> index_set, std::vector<GmbHypothesis> hypotheses);

    [[nodiscard]] const std::vector<int>& index_set() const { return index_set_; }
    [[nodiscard]] const std::vector<GmbHypothesis>& hypotheses() const { return hypotheses_; }
    [[nodiscard]] bool empty() const { return hypotheses_.empty(); }

private:
    std::vector<int> index_set_;
    std::vector<GmbHypothesis> hypotheses_;
};

/// One marginalized hypothesis: an index set, a weight, and one merged
/// density per index. Densities are hypothesis-conditional: the same index
/// may carry different densities under different index sets.
struct SoGmbHypothesis {
    std::vector<int> indices;                       // sorted index set
    double weight = 0.0;
    std::map<int, GaussianMixturePtr> densities;    // index -> normalized density
};

/// Second-order marginal form of a GMB: association histories summed out,
/// PHD and cardinality distribution of the source preserved.
class SoGmbDensity {
public:
    SoGmbDensity() = default;
    SoGmbDensity(std::vector<int> index_set, std::vector<SoGmbHypothesis> hypotheses);

    [[nodiscard]] const std::vector<int>& index_set() const { return index_set_; }
    [[nodiscard]] const std::vector<SoGmbHypothesis>& hypotheses() const { return hypotheses_; }
    [[nodiscard]] bool empty() const { return hypotheses_.empty(); }

private:
    std::vector<int> index_set_;
    std::vector<SoGmbHypothesis> hypotheses_;
};

// ---------------------------------------------------------------------------
// Derived statistics
// ---------------------------------------------------------------------------

/// rho(n) = sum of hypothesis weights with |I| = n.
CardinalityDistribution gmb_cardinality(const GmbDensity& d);
CardinalityDistribution sogmb_cardinality(const SoGmbDensity& d);

/// First-moment density v(x) = sum over hypotheses of w * sum_{i in I} p^i(x).
double gmb_phd(const GmbDensity& d, const Eigen::VectorXd& x);
double sogmb_phd(const SoGmbDensity& d, const Eigen::VectorXd& x);

/// MAP multi-object estimate: pick the most probable cardinality n*, then the
/// highest-weight hypothesis with |I| = n*, and report its density means.
std::vector<Eigen::VectorXd> extract_map(const GmbDensity& d);

} // namespace rfs
