#pragma once

#include "rfsfusion/densities.hpp"
#include "rfsfusion/measurement.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rfs {

/// Linear-Gaussian single-target motion model with survival probability.
struct MotionModel {
    Eigen::MatrixXd transition;        // F
    Eigen::MatrixXd process_noise;     // Q
    double p_survival = 0.98;
};

/// Nearly-constant-velocity model on [px py vx vy] with sampling period dt
/// and noise power sigma_v^2.
MotionModel constant_velocity_model(double dt, double sigma_v, double p_survival);

/// Point-detection sensor: linear observation, Gaussian noise, independent
/// detections, Poisson clutter uniform over the region.
struct SensorModel {
    double p_detect = 0.9;
    double clutter_rate = 15.0;        // lambda_c
    Region region;
    Eigen::MatrixXd observation;       // H
    Eigen::MatrixXd noise;             // R

    /// Clutter intensity lambda_c * (uniform density over the region).
    [[nodiscard]] double clutter_intensity() const {
        return clutter_rate / region.area();
    }
};

/// Position-only sensor with noise sigma_eps on each axis.
SensorModel position_sensor(const Region& region, double p_detect, double clutter_rate,
                            double sigma_eps);

/// One labeled-multi-Bernoulli birth component.
struct BirthComponent {
    double r = 0.0;                    // existence probability
    GaussianMixturePtr density;        // normalized spatial density
    int label_index = 0;               // index part of the birth label
};

struct BirthModel {
    std::vector<BirthComponent> components;
};

/// Hypothesis-management knobs for the filter. The local filter's truncation
/// limits are free parameters; these defaults keep desk-scale runs tractable.
struct GlmbFilterParams {
    int k_best = 100;                   // posterior components kept per update
    double prune_threshold = 1e-5;      // posterior weight floor
    int max_components = 100;           // posterior component cap
    double gate_mahalanobis = 6.0;      // measurement gate, in sigma units
    double predict_weight_floor = 1e-9; // dropped during prediction enumeration
    int predict_max_components = 300;   // predicted component cap
};

/// delta-GLMB prediction: survival thinning with p_survival, Kalman
/// prediction of every track density, and augmentation with all birth-label
/// subsets. `step` stamps the birth labels' time field. Output normalized.
GlmbDensity predict(const GlmbDensity& prior, const MotionModel& motion,
                    const BirthModel& birth, int step,
                    const GlmbFilterParams& params = {});

/// delta-GLMB measurement update. Per predicted component, association maps
/// (each track missed or assigned a distinct gated measurement) are ranked
/// with Murty's method on the log-cost matrix; the k_best highest-weight
/// posterior components are kept globally and renormalized.
GlmbDensity update(const GlmbDensity& predicted, const MeasurementScan& scan,
                   const SensorModel& sensor, int k_best,
                   const GlmbFilterParams& params = {});

/// Drop components below the weight threshold, cap the count, renormalize.
GlmbDensity prune(const GlmbDensity& d, double weight_threshold, int max_components);

/// MAP multi-object estimate from a GLMB posterior: most probable
/// cardinality n*, then the best component with |L| = n*.
struct LabeledEstimate {
    std::vector<Eigen::VectorXd> states;
    std::vector<Label> labels;
};
LabeledEstimate extract_map(const GlmbDensity& posterior);

} // namespace rfs
