#include "rfsfusion/scenario.hpp"

#include "rfsfusion/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace rfs {

namespace {

using nlohmann::json;

ScenarioConfig base_scenario() {
    ScenarioConfig config;
    config.region = Region{{0.0, 0.0}, {10000.0, 10000.0}};
    config.steps = 40;
    config.dt = 1.0;
    config.motion = constant_velocity_model(config.dt, 5.0, 0.98);
    config.sensors = {
        position_sensor(config.region, 0.9, 15.0, 14.0),
        position_sensor(config.region, 0.9, 15.0, 14.0),
    };
    const Eigen::Vector4d cov_diag(100.0 * 100.0, 100.0 * 100.0, 20.0 * 20.0, 20.0 * 20.0);
    const std::vector<Eigen::Vector4d> means = {
        {3500.0, 1500.0, 0.0, 0.0},
        {4500.0, 1500.0, 0.0, 0.0},
        {3150.0, 4900.0, 0.0, 0.0},
        {6050.0, 7150.0, 0.0, 0.0},
    };
    for (std::size_t i = 0; i < means.size(); ++i) {
        BirthComponent b;
        b.r = 0.06;
        b.density = make_gaussian(1.0, means[i], cov_diag.asDiagonal());
        b.label_index = static_cast<int>(i);
        config.birth.components.push_back(std::move(b));
    }
    return config;
}

json vector_to_json(const Eigen::Vector4d& v) {
    return json::array({v(0), v(1), v(2), v(3)});
}

Eigen::Vector4d vector4_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 4) {
        throw SchemaError("scenario field '" + field + "' must be an array of 4 numbers");
    }
    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) {
        if (!j[static_cast<std::size_t>(i)].is_number()) {
            throw SchemaError("scenario field '" + field + "' must contain numbers");
        }
        v(i) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

template <typename T>
T get_field(const json& j, const std::string& field) {
    if (!j.contains(field)) {
        throw SchemaError("scenario is missing field '" + field + "'");
    }
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw SchemaError("scenario field '" + field + "' has the wrong type");
    }
}

} // namespace

std::vector<std::vector<TruthState>> generate_truth(const ScenarioConfig& config) {
    std::vector<std::vector<TruthState>> truth(static_cast<std::size_t>(config.steps));
    for (std::size_t id = 0; id < config.tracks.size(); ++id) {
        const TruthTrack& track = config.tracks[id];
        Eigen::Vector4d state = track.initial_state;
        for (int step = track.birth_step; step <= std::min(track.death_step, config.steps);
             ++step) {
            truth[static_cast<std::size_t>(step - 1)].push_back(
                TruthState{static_cast<int>(id), state});
            state.head<2>() += config.dt * state.tail<2>();
        }
    }
    return truth;
}

MeasurementScan generate_scan(const std::vector<TruthState>& truth, const SensorModel& sensor,
                              int step, Rng& rng) {
    MeasurementScan scan;
    scan.step = step;
    // Stream layout per step: one detection draw per target (plus two noise
    // draws when detected), then the clutter count, then two draws per
    // clutter point.
    for (const TruthState& target : truth) {
        if (!rng.bernoulli(sensor.p_detect)) continue;
        Eigen::VectorXd z = sensor.observation * target.state;
        const double sigma = std::sqrt(sensor.noise(0, 0));
        z(0) += rng.normal(0.0, sigma);
        z(1) += rng.normal(0.0, sigma);
        Eigen::Vector2d point(z(0), z(1));
        point.x() = std::clamp(point.x(), sensor.region.lo.x(), sensor.region.hi.x());
        point.y() = std::clamp(point.y(), sensor.region.lo.y(), sensor.region.hi.y());
        scan.points.push_back(point);
    }
    const int clutter = rng.poisson(sensor.clutter_rate);
    for (int i = 0; i < clutter; ++i) {
        const double x = rng.uniform(sensor.region.lo.x(), sensor.region.hi.x());
        const double y = rng.uniform(sensor.region.lo.y(), sensor.region.hi.y());
        scan.points.emplace_back(x, y);
    }
    return scan;
}

ScenarioConfig scenario1() {
    ScenarioConfig config = base_scenario();
    config.name = "scenario1";
    config.seed = 20240901;
    // Straight constant-velocity tracks. Track 0 passes through both meeting
    // points: (4000, 2200) at step 5 together with track 1, and
    // (6000, 4900) at step 20 together with tracks 2 and 3.
    const double vx0 = 2000.0 / 15.0;
    const double vy0 = 2700.0 / 15.0;
    config.tracks = {
        {1, 40, {4000.0 - 4.0 * vx0, 2200.0 - 4.0 * vy0, vx0, vy0}},
        {1, 25, {4500.0, 1500.0, -125.0, 175.0}},
        {1, 35, {3150.0, 4900.0, 150.0, 0.0}},
        {1, 40, {6050.0, 7150.0, -50.0 / 19.0, -2250.0 / 19.0}},
        {10, 40, {4500.0, 1500.0, 50.0, 120.0}},
    };
    return config;
}

ScenarioConfig scenario2() {
    ScenarioConfig config = base_scenario();
    config.name = "scenario2";
    config.seed = 20240902;
    // Four tracks sharing a narrow north-east corridor: tracks 0 and 1 run in
    // parallel and cross at step 21, track 2 cuts through the corridor, and
    // track 3 is born mid-run behind track 0. Two mid-run deaths.
    config.tracks = {
        {1, 40, {3500.0, 1500.0, 100.0, 80.0}},
        {1, 28, {4500.0, 1500.0, 50.0, 80.0}},
        {1, 34, {3150.0, 4900.0, 125.0, -65.0}},
        {12, 40, {4500.0, 1500.0, 100.0, 95.0}},
    };
    return config;
}

void validate_scenario(const ScenarioConfig& config) {
    if (config.steps < 1) throw SchemaError("steps must be at least 1");
    if (config.dt <= 0.0) throw SchemaError("dt must be positive");
    if (config.region.hi.x() <= config.region.lo.x() ||
        config.region.hi.y() <= config.region.lo.y()) {
        throw SchemaError("region bounds are empty");
    }
    if (config.sensors.empty()) throw SchemaError("at least one sensor is required");
    for (std::size_t i = 0; i < config.sensors.size(); ++i) {
        const SensorModel& s = config.sensors[i];
        const std::string where = "sensor " + std::to_string(i);
        if (s.p_detect < 0.0 || s.p_detect > 1.0) {
            throw SchemaError(where + ": p_detect outside [0, 1]");
        }
        if (s.clutter_rate < 0.0) throw SchemaError(where + ": clutter_rate negative");
        if (s.noise(0, 0) <= 0.0) throw SchemaError(where + ": measurement noise not positive");
    }
    if (config.motion.p_survival < 0.0 || config.motion.p_survival > 1.0) {
        throw SchemaError("p_survival outside [0, 1]");
    }
    for (std::size_t i = 0; i < config.birth.components.size(); ++i) {
        const BirthComponent& b = config.birth.components[i];
        if (b.r < 0.0 || b.r > 1.0) {
            throw SchemaError("birth component " + std::to_string(i) +
                              ": existence outside [0, 1]");
        }
        if (!b.density || !b.density->is_normalized()) {
            throw SchemaError("birth component " + std::to_string(i) +
                              ": density missing or not normalized");
        }
    }
    for (std::size_t i = 0; i < config.tracks.size(); ++i) {
        const TruthTrack& t = config.tracks[i];
        const std::string where = "track " + std::to_string(i);
        if (t.birth_step < 1 || t.birth_step > t.death_step) {
            throw SchemaError(where + ": birth must come before death");
        }
        if (!config.region.contains(t.initial_state.head<2>())) {
            throw SchemaError(where + ": initial position outside the region");
        }
    }
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open scenario file '" + path + "'");
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }

    ScenarioConfig config;
    config.name = j.value("name", std::string("scenario"));
    config.steps = get_field<int>(j, "steps");
    config.dt = j.value("dt", 1.0);
    config.seed = get_field<std::uint64_t>(j, "seed");

    const json& region = j.contains("region") ? j.at("region") : json::object();
    if (!region.contains("min") || !region.contains("max")) {
        throw SchemaError("scenario is missing region.min / region.max");
    }
    config.region.lo = Eigen::Vector2d(region.at("min").at(0).get<double>(),
                                       region.at("min").at(1).get<double>());
    config.region.hi = Eigen::Vector2d(region.at("max").at(0).get<double>(),
                                       region.at("max").at(1).get<double>());

    const json& motion = j.contains("motion") ? j.at("motion") : json::object();
    config.motion = constant_velocity_model(config.dt, get_field<double>(motion, "sigma_v"),
                                            get_field<double>(motion, "p_survival"));

    if (!j.contains("sensors") || !j.at("sensors").is_array() || j.at("sensors").empty()) {
        throw SchemaError("scenario needs a nonempty sensors array");
    }
    for (const json& s : j.at("sensors")) {
        config.sensors.push_back(position_sensor(config.region, get_field<double>(s, "p_detect"),
                                                 get_field<double>(s, "clutter_rate"),
                                                 get_field<double>(s, "sigma_eps")));
    }

    if (!j.contains("birth") || !j.at("birth").is_array()) {
        throw SchemaError("scenario needs a birth array");
    }
    int label_index = 0;
    for (const json& b : j.at("birth")) {
        BirthComponent comp;
        comp.r = get_field<double>(b, "existence");
        const Eigen::Vector4d mean = vector4_from_json(
            b.contains("mean") ? b.at("mean") : json(), "birth.mean");
        const Eigen::Vector4d cov_diag = vector4_from_json(
            b.contains("cov_diag") ? b.at("cov_diag") : json(), "birth.cov_diag");
        comp.density = make_gaussian(1.0, mean, cov_diag.asDiagonal());
        comp.label_index = label_index++;
        config.birth.components.push_back(std::move(comp));
    }

    if (j.contains("tracks")) {
        for (const json& t : j.at("tracks")) {
            TruthTrack track;
            track.birth_step = get_field<int>(t, "birth");
            track.death_step = get_field<int>(t, "death");
            track.initial_state = vector4_from_json(
                t.contains("state") ? t.at("state") : json(), "track.state");
            config.tracks.push_back(track);
        }
    }

    validate_scenario(config);
    return config;
}

void save_scenario(const ScenarioConfig& config, const std::string& path) {
    json j;
    j["name"] = config.name;
    j["steps"] = config.steps;
    j["dt"] = config.dt;
    j["seed"] = config.seed;
    j["region"] = {{"min", {config.region.lo.x(), config.region.lo.y()}},
                   {"max", {config.region.hi.x(), config.region.hi.y()}}};
    // sigma_v is recovered from Q(2,2) = sigma_v^2 dt^2.
    const double sigma_v =
        std::sqrt(config.motion.process_noise(2, 2)) / config.dt;
    j["motion"] = {{"sigma_v", sigma_v}, {"p_survival", config.motion.p_survival}};
    j["sensors"] = json::array();
    for (const SensorModel& s : config.sensors) {
        j["sensors"].push_back({{"p_detect", s.p_detect},
                                {"clutter_rate", s.clutter_rate},
                                {"sigma_eps", std::sqrt(s.noise(0, 0))}});
    }
    j["birth"] = json::array();
    for (const BirthComponent& b : config.birth.components) {
        const WeightedGaussian& g = b.density->components().front();
        Eigen::Vector4d mean = g.mean();
        Eigen::Vector4d cov_diag = g.covariance().diagonal();
        j["birth"].push_back({{"existence", b.r},
                              {"mean", vector_to_json(mean)},
                              {"cov_diag", vector_to_json(cov_diag)}});
    }
    j["tracks"] = json::array();
    for (const TruthTrack& t : config.tracks) {
        j["tracks"].push_back({{"birth", t.birth_step},
                               {"death", t.death_step},
                               {"state", vector_to_json(t.initial_state)}});
    }

    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot write scenario file '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

void write_truth_csv(const std::vector<std::vector<TruthState>>& truth, std::ostream& os) {
    os << "step,id,px,py,vx,vy\n";
    for (std::size_t k = 0; k < truth.size(); ++k) {
        for (const TruthState& t : truth[k]) {
            os << (k + 1) << ',' << t.track_id << ',' << t.state(0) << ',' << t.state(1)
               << ',' << t.state(2) << ',' << t.state(3) << '\n';
        }
    }
}

void write_scans_csv(const std::vector<std::vector<MeasurementScan>>& scans_per_sensor,
                     std::ostream& os) {
    os << "step,sensor,x,y\n";
    for (std::size_t s = 0; s < scans_per_sensor.size(); ++s) {
        for (const MeasurementScan& scan : scans_per_sensor[s]) {
            for (const auto& p : scan.points) {
                os << scan.step << ',' << s << ',' << p.x() << ',' << p.y() << '\n';
            }
        }
    }
}

} // namespace rfs
