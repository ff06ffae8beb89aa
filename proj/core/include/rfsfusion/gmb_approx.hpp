#pragma once

#include "rfsfusion/densities.hpp"

namespace rfs {

/// Counters for lossy events during approximation.
struct ApproxDiagnostics {
    int dropped_zero_weight_hypotheses = 0;
};

/// Marginalize labels: every GLMB component (L, c, w) becomes a GMB
/// hypothesis with the image of L under a fixed label-to-index bijection
/// (sorted label order over the whole density), phi = c, and the same weight
/// and densities.
GmbDensity strip_labels(const GlmbDensity& g);

struct SogmbOptions {
    /// Cap on merged mixture size per density; 0 keeps Eq.-exact mixtures.
    std::size_t max_components_per_density = 8;
};

/// Second-order approximation: hypothesis weights summed over association
/// histories, per-index densities replaced by the history-weighted mixture.
/// Preserves the PHD and the cardinality distribution of the input exactly
/// (up to the optional mixture cap).
SoGmbDensity to_sogmb(const GmbDensity& g, const SogmbOptions& options = {},
                      ApproxDiagnostics* diagnostics = nullptr);

struct FogmbOptions {
    /// Same cap as SogmbOptions, applied to the Bernoulli densities.
    std::size_t max_components_per_density = 8;
    /// Bernoulli components with existence below this are dropped before the
    /// hypothesis expansion (0 keeps everything).
    double existence_floor = 0.0;
    /// Keep at most this many Bernoulli components, largest existence first
    /// (0 keeps everything).
    std::size_t max_bernoulli = 0;
    /// Hypothesis truncation of the expanded multi-Bernoulli (0 = no cap).
    std::size_t max_hypotheses = 0;
};

/// First-order (PHD-matching) multi-Bernoulli baseline: r^i is the marginal
/// existence of index i, p^i the existence-weighted density. The MB is
/// expanded into hypothesis form with hypothesis-independent densities so the
/// same fusion machinery applies. Matches the input's PHD but in general not
/// its cardinality distribution.
SoGmbDensity to_fogmb(const GmbDensity& g, const FogmbOptions& options = {});

/// Embed a marginalized density back into GMB form (singleton history space).
GmbDensity to_gmb(const SoGmbDensity& d);

} // namespace rfs
