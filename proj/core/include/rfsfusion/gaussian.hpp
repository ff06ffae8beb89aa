#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace rfs {

/// A scaled Gaussian density: weight * N(x; mean, covariance).
///
/// The covariance is symmetrized (averaged with its transpose) on
/// construction and must be positive definite with condition number below
/// 1e12; anything worse throws instead of being regularized silently.
class WeightedGaussian {
public:
    WeightedGaussian(double weight, Eigen::VectorXd mean, Eigen::MatrixXd covariance);

    [[nodiscard]] double weight() const { return weight_; }
    [[nodiscard]] const Eigen::VectorXd& mean() const { return mean_; }
    [[nodiscard]] const Eigen::MatrixXd& covariance() const { return covariance_; }
    [[nodiscard]] int dim() const { return static_cast<int>(mean_.size()); }

    /// log N(x; mean, covariance), ignoring the weight.
    [[nodiscard]] double log_density(const Eigen::VectorXd& x) const;

    /// log |covariance|.
    [[nodiscard]] double log_det_covariance() const;

    /// Same Gaussian with a different weight.
    [[nodiscard]] WeightedGaussian with_weight(double w) const;

private:
    double weight_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd covariance_;
};

/// An ordered list of weighted Gaussian components. When it represents a
/// normalized spatial density the component weights sum to one.
class GaussianMixture {
public:
    GaussianMixture() = default;
    explicit GaussianMixture(std::vector<WeightedGaussian> components)
        : components_(std::move(components)) {}

    [[nodiscard]] const std::vector<WeightedGaussian>& components() const { return components_; }
    [[nodiscard]] std::size_t size() const { return components_.size(); }
    [[nodiscard]] bool empty() const { return components_.empty(); }

    void add(WeightedGaussian g) { components_.push_back(std::move(g)); }

    [[nodiscard]] double total_weight() const;
    [[nodiscard]] bool is_normalized(double tol = 1e-9) const;

    /// Mixture with weights rescaled to sum to one.
    [[nodiscard]] GaussianMixture normalized() const;

    /// Mixture density value at x (sum of weighted component densities).
    [[nodiscard]] double evaluate(const Eigen::VectorXd& x) const;

private:
    std::vector<WeightedGaussian> components_;
};

/// Shared immutable spatial density, the unit all multi-object densities
/// reference. Cheap to copy between hypotheses.
using GaussianMixturePtr = std::shared_ptr<const GaussianMixture>;

GaussianMixturePtr make_mixture(std::vector<WeightedGaussian> components);
GaussianMixturePtr make_gaussian(double weight, Eigen::VectorXd mean, Eigen::MatrixXd covariance);

/// weight * N(x; m, P).
double evaluate(const WeightedGaussian& g, const Eigen::VectorXd& x);

/// Exact Gaussian exponentiation: N(x;m,P)^w == scale * N(x; m, P/w) with
/// scale = ((2pi)^d |P|)^((1-w)/2) * w^(-d/2). The input weight must be one
/// (a normalized single-Gaussian density); w must lie in (0, 1].
struct GaussianPower {
    double scale = 1.0;
    double log_scale = 0.0;
    WeightedGaussian result;
};
GaussianPower power(const WeightedGaussian& g, double w);

/// Per-component power of a mixture under the exponential-mixture
/// approximation (sum d_i)^w ~= sum d_i^w. Component weights of the result
/// carry the w_i^w * scale_i factors, so the result is unnormalized.
GaussianMixture power_components(const GaussianMixture& p, double w);

/// Product identity N(x;m1,P1) N(x;m2,P2) = z N(x;m,P) with
/// P = (P1^-1 + P2^-1)^-1, m = P (P1^-1 m1 + P2^-1 m2) and
/// z = N(m1; m2, P1 + P2).
struct GaussianProduct {
    double log_scale = 0.0;
    WeightedGaussian result;
};
GaussianProduct product(const WeightedGaussian& a, const WeightedGaussian& b);

/// GCI cross term of two normalized mixtures:
///   eta  = integral p1(x)^w1 p2(x)^w2 dx
///   fused(x) = p1(x)^w1 p2(x)^w2 / eta      (normalized mixture)
/// computed in closed form per component pair; exact for single-Gaussian
/// inputs, per-component approximation otherwise. Requires w1 + w2 == 1.
struct CrossTerm {
    double eta = 0.0;
    double log_eta = 0.0;
    GaussianMixture fused;
};
CrossTerm fusion_cross_term(const GaussianMixture& p1, const GaussianMixture& p2,
                            double w1, double w2);

/// Single Gaussian matching the mixture's mean and covariance; keeps the
/// total weight.
WeightedGaussian moment_match(const GaussianMixture& m);

/// Reduce to at most max_components by repeatedly moment-matching the pair
/// with the smallest symmetric Mahalanobis distance. max_components == 0
/// means no cap.
GaussianMixture reduce_mixture(const GaussianMixture& m, std::size_t max_components);

} // namespace rfs
