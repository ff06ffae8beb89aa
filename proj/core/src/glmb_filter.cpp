#include "rfsfusion/glmb_filter.hpp"

#include "rfsfusion/assignment.hpp"
#include "rfsfusion/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace rfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Clutter-intensity floor used only to rank assignments when lambda_c == 0;
// final weights are recomputed exactly and zero-clutter maps that leave a
// measurement unassigned are dropped.
constexpr double kLogClutterFloor = -100.0;

double log_sum_exp(const std::vector<double>& logs) {
    double m = -kInf;
    for (double v : logs) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s);
}

/// Kalman prediction of every component of a track density.
GaussianMixturePtr predict_density(const GaussianMixture& density, const MotionModel& motion) {
    std::vector<WeightedGaussian> out;
    out.reserve(density.size());
    for (const auto& g : density.components()) {
        Eigen::VectorXd mean = motion.transition * g.mean();
        Eigen::MatrixXd cov =
            motion.transition * g.covariance() * motion.transition.transpose() +
            motion.process_noise;
        out.emplace_back(g.weight(), std::move(mean), std::move(cov));
    }
    return make_mixture(std::move(out));
}

/// Measurement update of one track density against one measurement:
/// log predictive likelihood log q(z) and the updated (single-Gaussian)
/// density. Mixture components are updated individually and then merged;
/// each association hypothesis carries one Gaussian.
struct TrackMeasUpdate {
    double log_likelihood = -kInf;
    GaussianMixturePtr updated;
};

TrackMeasUpdate kalman_update(const GaussianMixture& density, const Eigen::Vector2d& z,
                              const SensorModel& sensor) {
    const Eigen::MatrixXd& H = sensor.observation;
    std::vector<double> log_lik;
    std::vector<WeightedGaussian> updated;
    log_lik.reserve(density.size());
    updated.reserve(density.size());
    for (const auto& g : density.components()) {
        const Eigen::VectorXd z_pred = H * g.mean();
        const Eigen::MatrixXd S = H * g.covariance() * H.transpose() + sensor.noise;
        const WeightedGaussian innovation(1.0, z_pred, S);
        const double ll = std::log(g.weight()) + innovation.log_density(z);

        const Eigen::MatrixXd PH = g.covariance() * H.transpose();
        const Eigen::MatrixXd K = S.llt().solve(PH.transpose()).transpose();
        const Eigen::VectorXd mean = g.mean() + K * (z - z_pred);
        const Eigen::MatrixXd I =
            Eigen::MatrixXd::Identity(g.covariance().rows(), g.covariance().cols());
        const Eigen::MatrixXd IKH = I - K * H;
        // Joseph form
        Eigen::MatrixXd cov =
            IKH * g.covariance() * IKH.transpose() + K * sensor.noise * K.transpose();
        updated.emplace_back(std::exp(ll), mean, std::move(cov));
        log_lik.push_back(ll);
    }
    TrackMeasUpdate result;
    result.log_likelihood = log_sum_exp(log_lik);
    const GaussianMixture posterior(std::move(updated));
    result.updated = make_mixture({moment_match(posterior).with_weight(1.0)});
    return result;
}

/// Squared Mahalanobis distance of z from the track's predicted measurement,
/// minimized over mixture components.
double gate_distance_sq(const GaussianMixture& density, const Eigen::Vector2d& z,
                        const SensorModel& sensor) {
    const Eigen::MatrixXd& H = sensor.observation;
    double best = kInf;
    for (const auto& g : density.components()) {
        const Eigen::VectorXd innovation = z - H * g.mean();
        const Eigen::MatrixXd S = H * g.covariance() * H.transpose() + sensor.noise;
        const double d2 = innovation.dot(S.llt().solve(innovation));
        best = std::min(best, d2);
    }
    return best;
}

struct WeightedComponent {
    double log_weight;
    GlmbComponent component;
};

/// Sort, floor, cap and renormalize a set of log-weighted components.
GlmbDensity finalize(std::vector<WeightedComponent> components, double weight_floor,
                     int max_components) {
    if (components.empty()) {
        return GlmbDensity();
    }
    std::stable_sort(components.begin(), components.end(),
                     [](const WeightedComponent& a, const WeightedComponent& b) {
                         return a.log_weight > b.log_weight;
                     });
    if (max_components > 0 && static_cast<int>(components.size()) > max_components) {
        components.resize(static_cast<std::size_t>(max_components));
    }
    std::vector<double> logs;
    logs.reserve(components.size());
    for (const auto& c : components) logs.push_back(c.log_weight);
    const double log_total = log_sum_exp(logs);
    if (!std::isfinite(log_total)) {
        throw DegenerateFusionError("all GLMB component weights vanished");
    }

    std::vector<GlmbComponent> kept;
    kept.reserve(components.size());
    double kept_total = 0.0;
    for (auto& c : components) {
        const double w = std::exp(c.log_weight - log_total);
        if (w < weight_floor && !kept.empty()) continue;
        c.component.weight = w;
        kept_total += w;
        kept.push_back(std::move(c.component));
    }
    for (auto& c : kept) c.weight /= kept_total;
    return GlmbDensity(std::move(kept));
}

} // namespace

MotionModel constant_velocity_model(double dt, double sigma_v, double p_survival) {
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(4, 4);
    F.block<2, 2>(0, 0) = I;
    F.block<2, 2>(0, 2) = dt * I;
    F.block<2, 2>(2, 2) = I;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(4, 4);
    const double d2 = dt * dt;
    Q.block<2, 2>(0, 0) = (d2 * d2 / 4.0) * I;
    Q.block<2, 2>(0, 2) = (d2 * dt / 2.0) * I;
    Q.block<2, 2>(2, 0) = (d2 * dt / 2.0) * I;
    Q.block<2, 2>(2, 2) = d2 * I;
    Q *= sigma_v * sigma_v;
    return MotionModel{std::move(F), std::move(Q), p_survival};
}

SensorModel position_sensor(const Region& region, double p_detect, double clutter_rate,
                            double sigma_eps) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 4);
    H.block<2, 2>(0, 0) = Eigen::Matrix2d::Identity();
    Eigen::MatrixXd R = sigma_eps * sigma_eps * Eigen::Matrix2d::Identity();
    return SensorModel{p_detect, clutter_rate, region, std::move(H), std::move(R)};
}

GlmbDensity predict(const GlmbDensity& prior, const MotionModel& motion,
                    const BirthModel& birth, int step, const GlmbFilterParams& params) {
    for (const auto& b : birth.components) {
        if (b.r < 0.0 || b.r > 1.0) {
            throw InvalidParameterError("birth existence probability outside [0, 1]");
        }
    }
    const double ps = motion.p_survival;
    const double log_floor =
        params.predict_weight_floor > 0.0 ? std::log(params.predict_weight_floor) : -kInf;

    // Predict each distinct track density once.
    std::unordered_map<const GaussianMixture*, GaussianMixturePtr> predicted_cache;
    auto predict_cached = [&](const GaussianMixturePtr& density) {
        auto it = predicted_cache.find(density.get());
        if (it != predicted_cache.end()) return it->second;
        auto predicted = predict_density(*density, motion);
        predicted_cache.emplace(density.get(), predicted);
        return predicted;
    };

    // Birth subsets shared by all components: (log weight factor, labels).
    struct BirthSubset {
        double log_weight;
        std::vector<const BirthComponent*> members;
    };
    std::vector<BirthSubset> birth_subsets{{0.0, {}}};
    for (const auto& b : birth.components) {
        const std::size_t count = birth_subsets.size();
        for (std::size_t i = 0; i < count; ++i) {
            if (b.r > 0.0) {
                BirthSubset with = birth_subsets[i];
                with.log_weight += std::log(b.r);
                with.members.push_back(&b);
                birth_subsets.push_back(std::move(with));
            }
            birth_subsets[i].log_weight += std::log1p(-b.r);
        }
    }

    std::vector<WeightedComponent> out;
    const std::vector<GlmbComponent> prior_components =
        prior.empty() ? std::vector<GlmbComponent>{GlmbComponent{{}, 0, 1.0, {}}}
                      : prior.components();

    for (const auto& parent : prior_components) {
        if (parent.weight <= 0.0) continue;
        const double log_parent = std::log(parent.weight);

        // Enumerate survivor subsets, highest-weight first (few deaths
        // dominate when p_survival is close to one).
        std::vector<std::pair<double, std::vector<const Label*>>> survivor_sets{{0.0, {}}};
        for (const Label& l : parent.labels) {
            const std::size_t count = survivor_sets.size();
            for (std::size_t i = 0; i < count; ++i) {
                if (ps > 0.0) {
                    auto with = survivor_sets[i];
                    with.first += std::log(ps);
                    with.second.push_back(&l);
                    survivor_sets.push_back(std::move(with));
                }
                survivor_sets[i].first += ps < 1.0 ? std::log1p(-ps) : -kInf;
            }
        }

        for (const auto& [log_surv, survivors] : survivor_sets) {
            if (!std::isfinite(log_surv) || log_parent + log_surv < log_floor) continue;
            for (const auto& bs : birth_subsets) {
                const double log_w = log_parent + log_surv + bs.log_weight;
                if (!std::isfinite(log_w) || log_w < log_floor) continue;

                GlmbComponent c;
                c.history = parent.history;
                for (const Label* l : survivors) {
                    c.labels.push_back(*l);
                    c.tracks[*l] = predict_cached(parent.tracks.at(*l));
                }
                for (const BirthComponent* b : bs.members) {
                    const Label label{step, b->label_index};
                    c.labels.push_back(label);
                    c.tracks[label] = b->density;
                }
                std::sort(c.labels.begin(), c.labels.end());
                out.push_back(WeightedComponent{log_w, std::move(c)});
            }
        }
    }
    return finalize(std::move(out), 0.0, params.predict_max_components);
}

GlmbDensity update(const GlmbDensity& predicted, const MeasurementScan& scan,
                   const SensorModel& sensor, int k_best, const GlmbFilterParams& params) {
    if (k_best < 1) {
        throw InvalidParameterError("k_best must be at least 1");
    }
    const int m = static_cast<int>(scan.points.size());
    const double pd = sensor.p_detect;
    const double log_pd = pd > 0.0 ? std::log(pd) : -kInf;
    const double log_qd = pd < 1.0 ? std::log1p(-pd) : -kInf;
    const double kappa = sensor.clutter_intensity();
    const double log_kappa = kappa > 0.0 ? std::log(kappa) : -kInf;
    const double log_kappa_rank = std::max(log_kappa, kLogClutterFloor);
    const double gate_sq = params.gate_mahalanobis * params.gate_mahalanobis;

    // Per distinct (track density, measurement): gate, likelihood, update.
    struct TrackInfo {
        std::vector<double> log_q;                 // per measurement, -inf if gated out
        std::vector<GaussianMixturePtr> updated;   // per measurement
    };
    std::unordered_map<const GaussianMixture*, TrackInfo> cache;
    auto track_info = [&](const GaussianMixturePtr& density) -> const TrackInfo& {
        auto it = cache.find(density.get());
        if (it != cache.end()) return it->second;
        TrackInfo info;
        info.log_q.assign(static_cast<std::size_t>(m), -kInf);
        info.updated.assign(static_cast<std::size_t>(m), nullptr);
        for (int j = 0; j < m; ++j) {
            if (gate_distance_sq(*density, scan.points[static_cast<std::size_t>(j)], sensor) >
                gate_sq) {
                continue;
            }
            TrackMeasUpdate u =
                kalman_update(*density, scan.points[static_cast<std::size_t>(j)], sensor);
            info.log_q[static_cast<std::size_t>(j)] = u.log_likelihood;
            info.updated[static_cast<std::size_t>(j)] = std::move(u.updated);
        }
        return cache.emplace(density.get(), std::move(info)).first->second;
    };

    // Murty solution budget per component, proportional to sqrt(weight).
    std::vector<int> budget;
    {
        double sqrt_total = 0.0;
        for (const auto& c : predicted.components()) sqrt_total += std::sqrt(c.weight);
        for (const auto& c : predicted.components()) {
            const int share = static_cast<int>(
                std::ceil(k_best * std::sqrt(c.weight) / std::max(sqrt_total, 1e-300)));
            budget.push_back(std::max(1, share));
        }
    }

    std::vector<WeightedComponent> out;
    int next_history = 0;
    for (std::size_t ci = 0; ci < predicted.components().size(); ++ci) {
        const GlmbComponent& comp = predicted.components()[ci];
        const int n = static_cast<int>(comp.labels.size());
        const double log_parent = comp.weight > 0.0 ? std::log(comp.weight) : -kInf;
        if (!std::isfinite(log_parent)) continue;

        // Cost matrix: columns [0, m) are measurement assignments, column
        // m + i is track i's missed-detection option.
        Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, m + n, kInf);
        std::vector<const TrackInfo*> infos(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto& density = comp.tracks.at(comp.labels[static_cast<std::size_t>(i)]);
            const TrackInfo& info = track_info(density);
            infos[static_cast<std::size_t>(i)] = &info;
            for (int j = 0; j < m; ++j) {
                const double lq = info.log_q[static_cast<std::size_t>(j)];
                if (std::isfinite(lq) && std::isfinite(log_pd)) {
                    cost(i, j) = -(log_pd + lq - log_kappa_rank);
                }
            }
            if (std::isfinite(log_qd)) {
                cost(i, m + i) = -log_qd;
            }
        }

        for (const Assignment& assignment :
             murty(cost, budget[ci])) {
            GlmbComponent child;
            child.labels = comp.labels;
            child.history = next_history++;
            // Exact weight, independent of the ranking floor: missed and
            // assigned factors plus one clutter-intensity factor per
            // measurement left unassigned.
            double log_w = log_parent;
            int assigned = 0;
            for (int i = 0; i < n; ++i) {
                const Label& label = comp.labels[static_cast<std::size_t>(i)];
                const int j = assignment.row_to_col[static_cast<std::size_t>(i)];
                if (j < m) {
                    ++assigned;
                    log_w += log_pd + infos[static_cast<std::size_t>(i)]->log_q[static_cast<std::size_t>(j)];
                    child.tracks[label] =
                        infos[static_cast<std::size_t>(i)]->updated[static_cast<std::size_t>(j)];
                } else {
                    log_w += log_qd;
                    child.tracks[label] = comp.tracks.at(label);
                }
            }
            const int unassigned = m - assigned;
            if (unassigned > 0) {
                log_w += unassigned * log_kappa;   // zero weight when kappa == 0
            }
            if (!std::isfinite(log_w)) continue;
            out.push_back(WeightedComponent{log_w, std::move(child)});
        }
    }

    if (out.empty()) {
        throw DegenerateFusionError(
            "measurement update produced no feasible posterior component");
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const WeightedComponent& a, const WeightedComponent& b) {
                         return a.log_weight > b.log_weight;
                     });
    if (static_cast<int>(out.size()) > k_best) {
        out.resize(static_cast<std::size_t>(k_best));
    }
    return finalize(std::move(out), 0.0, 0);
}

GlmbDensity prune(const GlmbDensity& d, double weight_threshold, int max_components) {
    if (max_components < 1) {
        throw InvalidParameterError("max_components must be at least 1");
    }
    std::vector<WeightedComponent> out;
    out.reserve(d.components().size());
    for (const auto& c : d.components()) {
        if (c.weight <= 0.0) continue;
        out.push_back(WeightedComponent{std::log(c.weight), c});
    }
    return finalize(std::move(out), weight_threshold, max_components);
}

LabeledEstimate extract_map(const GlmbDensity& posterior) {
    LabeledEstimate estimate;
    if (posterior.empty()) {
        return estimate;
    }
    const std::size_t n_star = posterior.cardinality().map_estimate();
    if (n_star == 0) {
        return estimate;
    }
    for (const auto& c : posterior.components()) {
        if (c.labels.size() != n_star) continue;
        for (const Label& l : c.labels) {
            estimate.states.push_back(moment_match(*c.tracks.at(l)).mean());
            estimate.labels.push_back(l);
        }
        return estimate;
    }
    return estimate;
}

} // namespace rfs
