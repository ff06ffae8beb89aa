#include <doctest.h>

#include <rfsfusion/errors.hpp>
#include <rfsfusion/scenario.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace rfs;

TEST_CASE("truth generation is linear and deterministic") {
    ScenarioConfig config = scenario1();
    const auto truth = generate_truth(config);
    REQUIRE(truth.size() == static_cast<std::size_t>(config.steps));

    SUBCASE("straight-line propagation") {
        const TruthTrack& t1 = config.tracks[1];   // born at step 1
        for (int k = 0; k < 10; ++k) {
            const auto& states = truth[static_cast<std::size_t>(k)];
            const auto it = std::find_if(states.begin(), states.end(),
                                         [](const TruthState& s) { return s.track_id == 1; });
            REQUIRE(it != states.end());
            CHECK(it->state(0) ==
                  doctest::Approx(t1.initial_state(0) + k * t1.initial_state(2)).epsilon(1e-12));
            CHECK(it->state(1) ==
                  doctest::Approx(t1.initial_state(1) + k * t1.initial_state(3)).epsilon(1e-12));
        }
    }
    SUBCASE("two tracks intersect at (4000, 2200) at step 5") {
        const auto& states = truth[4];
        int meeting = 0;
        for (const auto& s : states) {
            if (std::abs(s.state(0) - 4000.0) < 1e-6 && std::abs(s.state(1) - 2200.0) < 1e-6) {
                ++meeting;
            }
        }
        CHECK(meeting == 2);
    }
    SUBCASE("three tracks meet at (6000, 4900) at step 20") {
        const auto& states = truth[19];
        int meeting = 0;
        for (const auto& s : states) {
            if (std::abs(s.state(0) - 6000.0) < 1e-6 && std::abs(s.state(1) - 4900.0) < 1e-6) {
                ++meeting;
            }
        }
        CHECK(meeting == 3);
    }
    SUBCASE("births and deaths are honored") {
        // Track 4 is born at step 10; track 1 dies after step 25.
        auto count_id = [&](int step, int id) {
            const auto& states = truth[static_cast<std::size_t>(step - 1)];
            return std::count_if(states.begin(), states.end(),
                                 [id](const TruthState& s) { return s.track_id == id; });
        };
        CHECK(count_id(9, 4) == 0);
        CHECK(count_id(10, 4) == 1);
        CHECK(count_id(25, 1) == 1);
        CHECK(count_id(26, 1) == 0);
    }
    SUBCASE("truth stays inside the region") {
        for (const auto& step : truth) {
            for (const auto& s : step) {
                CHECK(config.region.contains(s.state.head<2>()));
            }
        }
    }
}

TEST_CASE("bundled scenario parameters") {
    const ScenarioConfig s1 = scenario1();
    CHECK(s1.region.hi.x() == 10000.0);
    CHECK(s1.motion.p_survival == 0.98);
    CHECK(s1.sensors.size() == 2);
    for (const auto& sensor : s1.sensors) {
        CHECK(sensor.p_detect == 0.9);
        CHECK(sensor.clutter_rate == 15.0);
        CHECK(sensor.noise(0, 0) == doctest::Approx(14.0 * 14.0));
    }
    REQUIRE(s1.birth.components.size() == 4);
    CHECK(s1.birth.components[0].r == 0.06);
    const auto& b0 = s1.birth.components[0].density->components().front();
    CHECK(b0.mean()(0) == 3500.0);
    CHECK(b0.mean()(1) == 1500.0);
    CHECK(b0.covariance()(0, 0) == doctest::Approx(100.0 * 100.0));
    CHECK(b0.covariance()(2, 2) == doctest::Approx(20.0 * 20.0));

    // Q for sigma_v = 5, dt = 1.
    const Eigen::MatrixXd& q = s1.motion.process_noise;
    CHECK(q(0, 0) == doctest::Approx(6.25));
    CHECK(q(0, 2) == doctest::Approx(12.5));
    CHECK(q(2, 0) == doctest::Approx(12.5));
    CHECK(q(2, 2) == doctest::Approx(25.0));

    const ScenarioConfig s2 = scenario2();
    CHECK(s2.tracks.size() == 4);
    validate_scenario(s1);
    validate_scenario(s2);
}

TEST_CASE("scan generation") {
    const Region region{{0.0, 0.0}, {10000.0, 10000.0}};
    std::vector<TruthState> targets = {
        {0, {2000.0, 3000.0, 10.0, 0.0}},
        {1, {7000.0, 8000.0, 0.0, -10.0}},
        {2, {4000.0, 4500.0, 5.0, 5.0}},
    };

    SUBCASE("noiseless certain detection returns exact positions") {
        const SensorModel ideal = position_sensor(region, 1.0, 0.0, 0.0);
        Rng rng(1);
        const MeasurementScan scan = generate_scan(targets, ideal, 1, rng);
        REQUIRE(scan.points.size() == 3);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            CHECK(scan.points[i].x() == targets[i].state(0));
            CHECK(scan.points[i].y() == targets[i].state(1));
        }
    }
    SUBCASE("clutter count is Poisson with the configured rate") {
        const SensorModel clutter_only = position_sensor(region, 0.9, 15.0, 14.0);
        double total = 0.0;
        const int draws = 1000;
        for (int i = 0; i < draws; ++i) {
            Rng rng = Rng::stream(7, {static_cast<std::uint64_t>(i)});
            total += static_cast<double>(generate_scan({}, clutter_only, 1, rng).points.size());
        }
        const double mean = total / draws;
        CHECK(std::abs(mean - 15.0) <= 3.0 * std::sqrt(15.0 / draws));
    }
    SUBCASE("detection rate matches p_detect") {
        const SensorModel sensor = position_sensor(region, 0.9, 0.0, 14.0);
        double total = 0.0;
        const int draws = 2000;
        for (int i = 0; i < draws; ++i) {
            Rng rng = Rng::stream(8, {static_cast<std::uint64_t>(i)});
            total += static_cast<double>(generate_scan(targets, sensor, 1, rng).points.size());
        }
        const double mean = total / draws;
        const double sigma = std::sqrt(3.0 * 0.9 * 0.1 / draws);
        CHECK(std::abs(mean - 2.7) <= 3.0 * sigma);
    }
    SUBCASE("identical seeds give identical scans") {
        const SensorModel sensor = position_sensor(region, 0.9, 15.0, 14.0);
        Rng rng_a = Rng::stream(99, {3, 1});
        Rng rng_b = Rng::stream(99, {3, 1});
        const MeasurementScan a = generate_scan(targets, sensor, 1, rng_a);
        const MeasurementScan b = generate_scan(targets, sensor, 1, rng_b);
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i] == b.points[i]);
        }
        Rng rng_c = Rng::stream(99, {3, 2});
        const MeasurementScan c = generate_scan(targets, sensor, 1, rng_c);
        CHECK((c.points.size() != a.points.size() || c.points != a.points));
    }
}

TEST_CASE("scenario file round trip and validation") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "rfsfusion_scenario_test";
    fs::create_directories(dir);
    const std::string path = (dir / "s1.json").string();

    const ScenarioConfig original = scenario1();
    save_scenario(original, path);
    const ScenarioConfig loaded = load_scenario(path);

    CHECK(loaded.name == original.name);
    CHECK(loaded.steps == original.steps);
    CHECK(loaded.seed == original.seed);
    CHECK(loaded.tracks.size() == original.tracks.size());
    CHECK(loaded.sensors.size() == original.sensors.size());
    CHECK(loaded.motion.p_survival == doctest::Approx(original.motion.p_survival));
    CHECK(loaded.motion.process_noise(2, 2) ==
          doctest::Approx(original.motion.process_noise(2, 2)));
    for (std::size_t i = 0; i < original.tracks.size(); ++i) {
        CHECK(loaded.tracks[i].birth_step == original.tracks[i].birth_step);
        CHECK(loaded.tracks[i].death_step == original.tracks[i].death_step);
        CHECK((loaded.tracks[i].initial_state - original.tracks[i].initial_state).norm() ==
              doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("invalid configs are rejected with the offending field") {
        ScenarioConfig bad = scenario1();
        bad.tracks[0].death_step = 0;
        CHECK_THROWS_AS(validate_scenario(bad), SchemaError);

        ScenarioConfig outside = scenario1();
        outside.tracks[0].initial_state(0) = -5.0;
        CHECK_THROWS_AS(validate_scenario(outside), SchemaError);

        ScenarioConfig no_sensors = scenario1();
        no_sensors.sensors.clear();
        CHECK_THROWS_AS(validate_scenario(no_sensors), SchemaError);
    }
    SUBCASE("missing fields are schema errors") {
        const std::string bad_path = (dir / "bad.json").string();
        std::FILE* f = std::fopen(bad_path.c_str(), "w");
        std::fputs("{\"steps\": 10}", f);
        std::fclose(f);
        CHECK_THROWS_AS(load_scenario(bad_path), SchemaError);
        CHECK_THROWS_AS(load_scenario((dir / "missing.json").string()), SchemaError);
    }
}
