#pragma once

#include "rfsfusion/densities.hpp"
#include "rfsfusion/gmb_approx.hpp"

#include <vector>

namespace rfs {

/// Relative weight of each node in the geometric-mean fusion rule. Both
/// weights lie in (0, 1) and sum to one.
class FusionWeights {
public:
    FusionWeights() = default;
    FusionWeights(double w1, double w2);

    [[nodiscard]] double first() const { return w1_; }
    [[nodiscard]] double second() const { return w2_; }

private:
    double w1_ = 0.5;
    double w2_ = 0.5;
};

/// Injective correspondence from one node's track indices into the other's.
struct FusionMap {
    std::vector<int> domain;   // sorted index set of the reference node
    std::vector<int> image;    // image[i] = tau(domain[i]), pairwise distinct
};

/// All injective maps from `domain` into `codomain`;
/// |codomain|! / (|codomain| - |domain|)! of them, or none when the domain is
/// larger than the codomain.
std::vector<FusionMap> enumerate_fusion_maps(const std::vector<int>& domain,
                                             const std::vector<int>& codomain);

struct ScoredFusionMap {
    FusionMap map;
    double log_weight = 0.0;   // log of the unnormalized fused hypothesis weight
};

/// The k fusion maps with the largest unnormalized fused weight for the
/// reference hypothesis with index set `domain`, found by ranked assignment
/// on the pairwise cross-term cost matrix. Maps whose image is not a
/// hypothesis of `b` have zero weight and are not returned.
std::vector<ScoredFusionMap> k_best_fusion_maps(const std::vector<int>& domain,
                                                const SoGmbDensity& a, const SoGmbDensity& b,
                                                const FusionWeights& weights, int k);

struct FusionParams {
    FusionWeights weights{};
    int k_maps = 10;                  // fusion maps kept per reference hypothesis
    double weight_threshold = 1e-6;   // fused hypothesis weight floor
    int max_hypotheses = 100;         // fused hypothesis cap
};

/// Geometric-mean fusion of two marginalized posteriors. The first argument
/// is the reference node: fused hypotheses are (I, tau) pairs with I drawn
/// from `a` and tau mapping it into `b`; tau indices take the role of the
/// association history in the returned density. All weight products are
/// computed in the log domain.
GmbDensity fuse_pair(const SoGmbDensity& a, const SoGmbDensity& b,
                     const FusionParams& params = {});

/// Left fold of fuse_pair over an ordered list of posteriors, marginalizing
/// each intermediate result back to SO-GMB form before the next fusion.
GmbDensity fuse_sequential(const std::vector<SoGmbDensity>& posteriors,
                           const FusionParams& params = {},
                           const SogmbOptions& sogmb_options = {});

} // namespace rfs
