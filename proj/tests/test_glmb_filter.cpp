#include <doctest.h>

#include <rfsfusion/errors.hpp>
#include <rfsfusion/glmb_filter.hpp>
#include <rfsfusion/rng.hpp>

#include <cmath>

using namespace rfs;

namespace {

const Region kRegion{{0.0, 0.0}, {10000.0, 10000.0}};

GaussianMixturePtr state_gaussian(const Eigen::Vector4d& mean,
                                  const Eigen::Matrix4d& cov = Eigen::Matrix4d::Identity()) {
    return make_gaussian(1.0, mean, cov);
}

BirthModel four_component_birth(double r) {
    BirthModel birth;
    const Eigen::Vector4d cov_diag(1e4, 1e4, 400.0, 400.0);
    const std::vector<Eigen::Vector4d> means = {
        {3500, 1500, 0, 0}, {4500, 1500, 0, 0}, {3150, 4900, 0, 0}, {6050, 7150, 0, 0}};
    for (std::size_t i = 0; i < means.size(); ++i) {
        birth.components.push_back(
            BirthComponent{r, make_gaussian(1.0, means[i], cov_diag.asDiagonal()), static_cast<int>(i)});
    }
    return birth;
}

GlmbDensity bernoulli_glmb(double weight_present, const GaussianMixturePtr& density) {
    GlmbComponent empty;
    empty.history = 0;
    empty.weight = 1.0 - weight_present;
    GlmbComponent present;
    present.labels = {{1, 0}};
    present.history = 1;
    present.weight = weight_present;
    present.tracks[{1, 0}] = density;
    return GlmbDensity({empty, present});
}

} // namespace

TEST_CASE("glmb prediction") {
    const MotionModel motion = constant_velocity_model(1.0, 5.0, 0.98);

    SUBCASE("empty prior with the four-component birth") {
        const GlmbDensity predicted = predict(GlmbDensity(), motion, four_component_birth(0.06), 1);
        // Enumerate all 16 birth subsets by hand as the oracle.
        double empty_expected = 1.0;
        for (int i = 0; i < 4; ++i) empty_expected *= 1.0 - 0.06;
        double total = 0.0;
        for (int mask = 0; mask < 16; ++mask) {
            double w = 1.0;
            for (int i = 0; i < 4; ++i) w *= (mask & (1 << i)) ? 0.06 : 0.94;
            total += w;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        bool found_empty = false;
        for (const auto& c : predicted.components()) {
            if (c.labels.empty()) {
                found_empty = true;
                CHECK(c.weight == doctest::Approx(empty_expected).epsilon(1e-9));
            }
        }
        CHECK(found_empty);
        CHECK(predicted.components().size() == 16);
    }

    SUBCASE("deterministic survival keeps the label set") {
        GlmbComponent c;
        c.labels = {{1, 0}};
        c.weight = 1.0;
        c.tracks[{1, 0}] = state_gaussian({0, 0, 10, 0});
        const GlmbDensity prior({c});
        MotionModel certain = motion;
        certain.p_survival = 1.0;
        const GlmbDensity predicted = predict(prior, certain, BirthModel{}, 2);
        REQUIRE(predicted.components().size() == 1);
        const auto& comp = predicted.components().front();
        CHECK(comp.weight == doctest::Approx(1.0));
        CHECK(comp.labels == std::vector<Label>{{1, 0}});
        const Eigen::VectorXd mean = comp.tracks.at({1, 0})->components().front().mean();
        CHECK(mean(0) == doctest::Approx(10.0));
        CHECK(mean(1) == doctest::Approx(0.0));
        CHECK(mean(2) == doctest::Approx(10.0));
        CHECK(mean(3) == doctest::Approx(0.0));
    }
}

TEST_CASE("glmb update") {
    const SensorModel sensor = position_sensor(kRegion, 0.9, 15.0, 14.0);

    SUBCASE("missed-detection update of a bernoulli split") {
        const GlmbDensity predicted = bernoulli_glmb(0.5, state_gaussian({100, 100, 0, 0}));
        const MeasurementScan empty_scan{1, {}};
        const GlmbDensity posterior = update(predicted, empty_scan, sensor, 100);
        double present = 0.0;
        for (const auto& c : posterior.components()) {
            if (!c.labels.empty()) present += c.weight;
        }
        CHECK(present == doctest::Approx(0.5 * 0.1 / (0.5 + 0.5 * 0.1)).epsilon(1e-9));
    }

    SUBCASE("zero detection probability changes nothing") {
        SensorModel blind = sensor;
        blind.p_detect = 0.0;
        const GlmbDensity predicted = bernoulli_glmb(0.37, state_gaussian({5000, 5000, 0, 0}));
        MeasurementScan scan{1, {Eigen::Vector2d(5000.0, 5000.0), Eigen::Vector2d(100.0, 100.0)}};
        const GlmbDensity posterior = update(predicted, scan, blind, 100);
        REQUIRE(posterior.components().size() == predicted.components().size());
        for (std::size_t i = 0; i < posterior.components().size(); ++i) {
            const auto& after = posterior.components()[i];
            const auto& before = predicted.components()[i];
            CHECK(after.weight == doctest::Approx(before.weight).epsilon(1e-12));
            CHECK(after.labels == before.labels);
            for (const Label& l : after.labels) {
                CHECK(after.tracks.at(l).get() == before.tracks.at(l).get());
            }
        }
    }

    SUBCASE("single-track kalman update by hand") {
        // Unit prior at the origin, measurement at the origin: posterior mean
        // stays put and the position covariance halves.
        GlmbComponent c;
        c.labels = {{1, 0}};
        c.weight = 1.0;
        c.tracks[{1, 0}] = state_gaussian({0, 0, 0, 0});
        const GlmbDensity predicted({c});
        SensorModel unit = sensor;
        unit.p_detect = 1.0;
        unit.clutter_rate = 0.0;
        unit.noise = Eigen::Matrix2d::Identity();
        MeasurementScan scan{1, {Eigen::Vector2d(0.0, 0.0)}};
        const GlmbDensity posterior = update(predicted, scan, unit, 10);
        REQUIRE(posterior.components().size() == 1);
        const auto& track = *posterior.components().front().tracks.at({1, 0});
        REQUIRE(track.size() == 1);
        const auto& g = track.components().front();
        CHECK(g.mean().norm() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(g.covariance()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(g.covariance()(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(g.covariance()(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("empty scan never raises the expected cardinality") {
        Rng rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            const double w = 0.1 + 0.8 * rng.uniform();
            const GlmbDensity predicted = bernoulli_glmb(
                w, state_gaussian({rng.uniform(0, 9000), rng.uniform(0, 9000), 0, 0}));
            const GlmbDensity posterior = update(predicted, MeasurementScan{1, {}}, sensor, 50);
            CHECK(posterior.cardinality().mean() <= predicted.cardinality().mean() + 1e-12);
        }
    }

    SUBCASE("invalid k_best") {
        CHECK_THROWS_AS(update(bernoulli_glmb(0.5, state_gaussian({0, 0, 0, 0})),
                               MeasurementScan{1, {}}, sensor, 0),
                        InvalidParameterError);
    }
}

TEST_CASE("glmb pruning") {
    GaussianMixturePtr p = state_gaussian({100, 100, 0, 0});
    auto make3 = [&]() {
        GlmbComponent a;
        a.weight = 0.7;
        GlmbComponent b;
        b.labels = {{1, 0}};
        b.weight = 0.2;
        b.tracks[{1, 0}] = p;
        GlmbComponent c;
        c.labels = {{1, 1}};
        c.weight = 0.1;
        c.tracks[{1, 1}] = p;
        c.history = 1;
        return GlmbDensity({a, b, c});
    };
    SUBCASE("identity when everything is above threshold") {
        const GlmbDensity pruned = prune(make3(), 0.05, 10);
        REQUIRE(pruned.components().size() == 3);
        CHECK(pruned.components()[0].weight == doctest::Approx(0.7));
    }
    SUBCASE("cap then renormalize") {
        const GlmbDensity pruned = prune(make3(), 0.0, 2);
        REQUIRE(pruned.components().size() == 2);
        CHECK(pruned.components()[0].weight == doctest::Approx(0.7 / 0.9));
        CHECK(pruned.components()[1].weight == doctest::Approx(0.2 / 0.9));
    }
    SUBCASE("a single component is always retained") {
        GlmbComponent only;
        only.weight = 1.0;
        const GlmbDensity pruned = prune(GlmbDensity({only}), 0.9, 5);
        CHECK(pruned.components().size() == 1);
        CHECK(pruned.components()[0].weight == doctest::Approx(1.0));
    }
    SUBCASE("invalid cap") {
        CHECK_THROWS_AS(prune(make3(), 0.1, 0), InvalidParameterError);
    }
}

TEST_CASE("map extraction from a glmb") {
    GaussianMixturePtr p = state_gaussian({123, 456, 1, 2});
    SUBCASE("single component") {
        GlmbComponent c;
        c.labels = {{1, 0}};
        c.weight = 1.0;
        c.tracks[{1, 0}] = p;
        const LabeledEstimate est = extract_map(GlmbDensity({c}));
        REQUIRE(est.states.size() == 1);
        CHECK(est.states[0](0) == doctest::Approx(123.0));
        CHECK(est.labels[0] == Label{1, 0});
    }
    SUBCASE("map cardinality zero") {
        GlmbComponent empty;
        empty.weight = 0.6;
        GlmbComponent one;
        one.labels = {{1, 0}};
        one.weight = 0.4;
        one.tracks[{1, 0}] = p;
        CHECK(extract_map(GlmbDensity({empty, one})).states.empty());
    }
    SUBCASE("argmax cardinality then the best component") {
        GaussianMixturePtr q = state_gaussian({999, 999, 0, 0});
        GlmbComponent empty;
        empty.weight = 0.2;
        GlmbComponent one;
        one.labels = {{1, 0}};
        one.weight = 0.3;
        one.tracks[{1, 0}] = p;
        GlmbComponent two_heavy;
        two_heavy.labels = {{1, 0}, {1, 1}};
        two_heavy.weight = 0.3;
        two_heavy.history = 1;
        two_heavy.tracks[{1, 0}] = p;
        two_heavy.tracks[{1, 1}] = q;
        GlmbComponent two_light;
        two_light.labels = {{1, 0}, {1, 2}};
        two_light.weight = 0.2;
        two_light.history = 2;
        two_light.tracks[{1, 0}] = q;
        two_light.tracks[{1, 2}] = q;
        const LabeledEstimate est =
            extract_map(GlmbDensity({empty, one, two_heavy, two_light}));
        REQUIRE(est.states.size() == 2);
        CHECK(est.states[0](0) == doctest::Approx(123.0));
        CHECK(est.states[1](0) == doctest::Approx(999.0));
    }
    SUBCASE("empty posterior") {
        CHECK(extract_map(GlmbDensity()).states.empty());
    }
}

TEST_CASE("ideal-conditions cardinality recovery") {
    // P_D = 1, no clutter, exactly one measurement per target: the MAP
    // cardinality must find the single target in nearly every seeded run.
    const MotionModel motion = constant_velocity_model(1.0, 5.0, 0.98);
    SensorModel sensor = position_sensor(kRegion, 1.0, 0.0, 14.0);
    BirthModel birth = four_component_birth(0.06);

    int hits = 0;
    const int runs = 100;
    for (int run = 0; run < runs; ++run) {
        Rng rng = Rng::stream(99, {static_cast<std::uint64_t>(run)});
        Eigen::Vector4d truth(3500.0, 1500.0, 20.0, 30.0);
        GlmbDensity posterior;
        bool ok = true;
        for (int k = 1; k <= 10; ++k) {
            const GlmbDensity predicted = predict(posterior, motion, birth, k);
            MeasurementScan scan{k,
                                 {Eigen::Vector2d(truth(0) + 14.0 * rng.normal(),
                                                  truth(1) + 14.0 * rng.normal())}};
            const GlmbDensity updated = update(predicted, scan, sensor, 100);
            posterior = prune(updated, 1e-5, 100);
            truth.head<2>() += truth.tail<2>();
            if (k == 10) {
                ok = posterior.cardinality().map_estimate() == 1;
            }
        }
        if (ok) ++hits;
    }
    CHECK(hits >= 99);
}
