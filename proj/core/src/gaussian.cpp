#include "rfsfusion/gaussian.hpp"

#include "rfsfusion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>

namespace rfs {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kMaxConditionNumber = 1e12;

double log_sum_exp(const std::vector<double>& logs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s);
}

} // namespace

WeightedGaussian::WeightedGaussian(double weight, Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : weight_(weight), mean_(std::move(mean)), covariance_(std::move(covariance)) {
    if (weight_ < 0.0 || !std::isfinite(weight_)) {
        throw InvalidDensityError("Gaussian weight must be finite and nonnegative");
    }
    if (covariance_.rows() != covariance_.cols() || covariance_.rows() != mean_.size()) {
        throw InvalidDensityError("covariance shape does not match the mean");
    }
    const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
    const double asym = (covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale) {
        throw InvalidDensityError("covariance is not symmetric");
    }
    covariance_ = 0.5 * (covariance_ + covariance_.transpose()).eval();

    const Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    if (llt.info() != Eigen::Success) {
        throw DegenerateCovarianceError("covariance is not positive definite");
    }
    double min_diag = std::numeric_limits<double>::infinity();
    double max_diag = 0.0;
    for (int i = 0; i < covariance_.rows(); ++i) {
        const double d = llt.matrixL()(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw DegenerateCovarianceError("covariance is not positive definite");
        }
        min_diag = std::min(min_diag, d);
        max_diag = std::max(max_diag, d);
    }
    // Cholesky-factor diagonal ratio as the condition estimate.
    if ((max_diag / min_diag) * (max_diag / min_diag) > kMaxConditionNumber) {
        throw DegenerateCovarianceError("covariance condition number exceeds 1e12");
    }
}

double WeightedGaussian::log_density(const Eigen::VectorXd& x) const {
    const Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    const Eigen::VectorXd diff = x - mean_;
    const Eigen::VectorXd half = llt.matrixL().solve(diff);
    double log_det = 0.0;
    for (int i = 0; i < covariance_.rows(); ++i) {
        log_det += 2.0 * std::log(llt.matrixL()(i, i));
    }
    return -0.5 * (dim() * kLog2Pi + log_det + half.squaredNorm());
}

double WeightedGaussian::log_det_covariance() const {
    const Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
    double log_det = 0.0;
    for (int i = 0; i < covariance_.rows(); ++i) {
        log_det += 2.0 * std::log(llt.matrixL()(i, i));
    }
    return log_det;
}

WeightedGaussian WeightedGaussian::with_weight(double w) const {
    return WeightedGaussian(w, mean_, covariance_);
}

double GaussianMixture::total_weight() const {
    double s = 0.0;
    for (const auto& g : components_) s += g.weight();
    return s;
}

bool GaussianMixture::is_normalized(double tol) const {
    return std::abs(total_weight() - 1.0) <= tol;
}

GaussianMixture GaussianMixture::normalized() const {
    const double total = total_weight();
    if (total <= 0.0) {
        throw EmptyDensityError("cannot normalize a mixture with zero total weight");
    }
    std::vector<WeightedGaussian> out;
    out.reserve(components_.size());
    for (const auto& g : components_) {
        out.push_back(g.with_weight(g.weight() / total));
    }
    return GaussianMixture(std::move(out));
}

double GaussianMixture::evaluate(const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (const auto& g : components_) {
        s += rfs::evaluate(g, x);
    }
    return s;
}

GaussianMixturePtr make_mixture(std::vector<WeightedGaussian> components) {
    return std::make_shared<const GaussianMixture>(std::move(components));
}

GaussianMixturePtr make_gaussian(double weight, Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
    std::vector<WeightedGaussian> c;
    c.emplace_back(weight, std::move(mean), std::move(covariance));
    return make_mixture(std::move(c));
}

double evaluate(const WeightedGaussian& g, const Eigen::VectorXd& x) {
    return g.weight() * std::exp(g.log_density(x));
}

GaussianPower power(const WeightedGaussian& g, double w) {
    if (!(w > 0.0) || w > 1.0) {
        throw InvalidExponentError("power exponent must lie in (0, 1]");
    }
    const int d = g.dim();
    const double log_scale =
        0.5 * (1.0 - w) * (d * kLog2Pi + g.log_det_covariance()) - 0.5 * d * std::log(w);
    WeightedGaussian result(1.0, g.mean(), g.covariance() / w);
    return GaussianPower{std::exp(log_scale), log_scale, std::move(result)};
}

GaussianMixture power_components(const GaussianMixture& p, double w) {
    if (p.empty()) {
        throw EmptyDensityError("cannot exponentiate an empty mixture");
    }
    std::vector<WeightedGaussian> out;
    out.reserve(p.size());
    for (const auto& g : p.components()) {
        GaussianPower pw = power(g.with_weight(1.0), w);
        out.push_back(pw.result.with_weight(std::pow(g.weight(), w) * pw.scale));
    }
    return GaussianMixture(std::move(out));
}

GaussianProduct product(const WeightedGaussian& a, const WeightedGaussian& b) {
    if (a.dim() != b.dim()) {
        throw InvalidDensityError("Gaussian product requires matching dimensions");
    }
    const Eigen::MatrixXd pa_inv = a.covariance().llt().solve(
        Eigen::MatrixXd::Identity(a.dim(), a.dim()));
    const Eigen::MatrixXd pb_inv = b.covariance().llt().solve(
        Eigen::MatrixXd::Identity(b.dim(), b.dim()));
    Eigen::MatrixXd info = pa_inv + pb_inv;
    Eigen::MatrixXd cov = info.llt().solve(Eigen::MatrixXd::Identity(a.dim(), a.dim()));
    cov = 0.5 * (cov + cov.transpose()).eval();
    const Eigen::VectorXd mean = cov * (pa_inv * a.mean() + pb_inv * b.mean());

    const WeightedGaussian conv(1.0, b.mean(), a.covariance() + b.covariance());
    const double log_scale = conv.log_density(a.mean());
    return GaussianProduct{log_scale, WeightedGaussian(1.0, mean, cov)};
}

CrossTerm fusion_cross_term(const GaussianMixture& p1, const GaussianMixture& p2,
                            double w1, double w2) {
    if (p1.empty() || p2.empty()) {
        throw EmptyDensityError("fusion cross term of an empty mixture");
    }
    if (std::abs(w1 + w2 - 1.0) > 1e-12) {
        throw InvalidExponentError("fusion exponents must sum to one");
    }

    const GaussianMixture q1 = power_components(p1, w1);
    const GaussianMixture q2 = power_components(p2, w2);

    std::vector<double> log_terms;
    std::vector<WeightedGaussian> raw;
    log_terms.reserve(q1.size() * q2.size());
    raw.reserve(q1.size() * q2.size());
    for (const auto& a : q1.components()) {
        for (const auto& b : q2.components()) {
            GaussianProduct pr = product(a, b);
            const double log_term =
                std::log(a.weight()) + std::log(b.weight()) + pr.log_scale;
            log_terms.push_back(log_term);
            raw.push_back(std::move(pr.result));
        }
    }

    const double log_eta = log_sum_exp(log_terms);
    if (!std::isfinite(log_eta)) {
        throw DegenerateFusionError("fusion cross term underflowed to zero");
    }
    std::vector<WeightedGaussian> fused;
    fused.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        fused.push_back(raw[i].with_weight(std::exp(log_terms[i] - log_eta)));
    }
    return CrossTerm{std::exp(log_eta), log_eta, GaussianMixture(std::move(fused))};
}

WeightedGaussian moment_match(const GaussianMixture& m) {
    if (m.empty()) {
        throw EmptyDensityError("cannot moment match an empty mixture");
    }
    const double total = m.total_weight();
    if (total <= 0.0) {
        throw EmptyDensityError("cannot moment match a zero-weight mixture");
    }
    const int d = m.components().front().dim();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& g : m.components()) {
        mean += (g.weight() / total) * g.mean();
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& g : m.components()) {
        const Eigen::VectorXd diff = g.mean() - mean;
        cov += (g.weight() / total) * (g.covariance() + diff * diff.transpose());
    }
    return WeightedGaussian(total, std::move(mean), std::move(cov));
}

GaussianMixture reduce_mixture(const GaussianMixture& m, std::size_t max_components) {
    if (max_components == 0 || m.size() <= max_components) {
        return m;
    }
    // Slots hold live components; merged-away entries become empty.
    std::vector<std::optional<WeightedGaussian>> slots(m.components().begin(),
                                                       m.components().end());
    std::size_t live = slots.size();

    // Symmetric Mahalanobis distance between component means.
    auto distance = [](const WeightedGaussian& a, const WeightedGaussian& b) {
        const Eigen::VectorXd diff = a.mean() - b.mean();
        const double da = diff.dot(a.covariance().llt().solve(diff));
        const double db = diff.dot(b.covariance().llt().solve(diff));
        return da + db;
    };

    // Min-heap of candidate pairs with lazy invalidation via versions.
    struct Candidate {
        double dist;
        std::size_t i, j;
        std::uint32_t vi, vj;
        bool operator>(const Candidate& o) const { return dist > o.dist; }
    };
    std::vector<std::uint32_t> version(slots.size(), 0);
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
    for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
        for (std::size_t j = i + 1; j < slots.size(); ++j) {
            heap.push(Candidate{distance(*slots[i], *slots[j]), i, j, 0, 0});
        }
    }

    while (live > max_components && !heap.empty()) {
        const Candidate c = heap.top();
        heap.pop();
        if (!slots[c.i] || !slots[c.j] || version[c.i] != c.vi || version[c.j] != c.vj) {
            continue;   // stale entry
        }
        GaussianMixture pair({*slots[c.i], *slots[c.j]});
        slots[c.i] = moment_match(pair);
        slots[c.j].reset();
        ++version[c.i];
        --live;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            if (k == c.i || !slots[k]) continue;
            const std::size_t a = std::min(k, c.i);
            const std::size_t b = std::max(k, c.i);
            heap.push(Candidate{distance(*slots[a], *slots[b]), a, b, version[a], version[b]});
        }
    }

    std::vector<WeightedGaussian> out;
    out.reserve(live);
    for (auto& s : slots) {
        if (s) out.push_back(std::move(*s));
    }
    return GaussianMixture(std::move(out));
}

} // namespace rfs
