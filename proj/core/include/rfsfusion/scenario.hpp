#pragma once

#include "rfsfusion/glmb_filter.hpp"
#include "rfsfusion/measurement.hpp"
#include "rfsfusion/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace rfs {

/// One ground-truth track: alive from birth_step to death_step inclusive,
/// starting at `initial_state` and moving with noiseless constant velocity.
struct TruthTrack {
    int birth_step = 1;
    int death_step = 1;
    Eigen::Vector4d initial_state{0, 0, 0, 0};   // [px py vx vy]
};

/// Full description of a simulation: region, duration, truth, models, seed.
struct ScenarioConfig {
    std::string name;
    Region region;
    int steps = 0;                    // time steps 1..steps, dt = 1 s
    double dt = 1.0;
    std::vector<TruthTrack> tracks;
    MotionModel motion;               // filter motion model (noisy CV)
    std::vector<SensorModel> sensors;
    BirthModel birth;
    std::uint64_t seed = 0;
};

/// Truth state of one target at one step.
struct TruthState {
    int track_id = 0;
    Eigen::Vector4d state{0, 0, 0, 0};
};

/// Per-step truth, outer index = step - 1. Truth motion is noiseless
/// constant velocity (the filter's process noise is a deliberate model
/// mismatch), so the output is the same for every seed.
std::vector<std::vector<TruthState>> generate_truth(const ScenarioConfig& config);

/// One sensor scan: each target detected with probability p_detect, detected
/// targets report H x plus Gaussian noise, plus Poisson-many uniform clutter
/// points. Points falling outside the region are clamped to it.
MeasurementScan generate_scan(const std::vector<TruthState>& truth, const SensorModel& sensor,
                              int step, Rng& rng);

/// Bundled two-node scenario with straight crossing trajectories: two tracks
/// intersect at (4000, 2200) at step 5 and three meet at (6000, 4900) at
/// step 20.
ScenarioConfig scenario1();

/// Bundled two-node scenario with four tracks in a tight band moving mostly
/// in parallel, two mid-run deaths, one mid-run birth, and two crossings.
ScenarioConfig scenario2();

/// JSON scenario file I/O; the schema is documented in docs/file-formats.md.
ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& config, const std::string& path);

/// Check the structural invariants (births before deaths, initial states
/// inside the region, valid model parameters). Throws SchemaError with the
/// offending field on failure.
void validate_scenario(const ScenarioConfig& config);

/// CSV exports: truth rows (step, id, px, py, vx, vy) and scan rows
/// (step, sensor, x, y).
void write_truth_csv(const std::vector<std::vector<TruthState>>& truth, std::ostream& os);
void write_scans_csv(const std::vector<std::vector<MeasurementScan>>& scans_per_sensor,
                     std::ostream& os);

} // namespace rfs
