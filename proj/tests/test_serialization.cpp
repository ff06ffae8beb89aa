#include <doctest.h>

#include <rfsfusion/errors.hpp>
#include <rfsfusion/gmb_approx.hpp>
#include <rfsfusion/serialization.hpp>

#include "support.hpp"

using namespace rfs;

namespace {

GlmbDensity sample_glmb() {
    Rng rng(42);
    GlmbComponent a;
    a.labels = {{1, 0}, {2, 1}};
    a.history = 3;
    a.weight = 0.6;
    a.tracks[{1, 0}] = test::random_mixture_1d(rng);
    a.tracks[{2, 1}] = test::random_mixture_1d(rng);
    GlmbComponent b;
    b.labels = {{1, 0}};
    b.history = 4;
    b.weight = 0.4;
    b.tracks[{1, 0}] = test::random_mixture_1d(rng);
    return GlmbDensity({a, b});
}

} // namespace

TEST_CASE("glmb text round trip") {
    const GlmbDensity d = sample_glmb();
    const GlmbDensity back = glmb_from_text(to_text(d));
    REQUIRE(back.components().size() == d.components().size());
    for (std::size_t i = 0; i < d.components().size(); ++i) {
        const auto& lhs = d.components()[i];
        const auto& rhs = back.components()[i];
        CHECK(lhs.labels == rhs.labels);
        CHECK(lhs.history == rhs.history);
        CHECK(lhs.weight == rhs.weight);   // %.17g round-trips exactly
        for (const Label& l : lhs.labels) {
            const auto& ml = *lhs.tracks.at(l);
            const auto& mr = *rhs.tracks.at(l);
            REQUIRE(ml.size() == mr.size());
            for (std::size_t c = 0; c < ml.size(); ++c) {
                CHECK(ml.components()[c].weight() == mr.components()[c].weight());
                CHECK(ml.components()[c].mean() == mr.components()[c].mean());
            }
        }
    }
}

TEST_CASE("gmb and sogmb text round trips preserve statistics") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const GmbDensity d = test::random_gmb_1d(rng);
        const GmbDensity back = gmb_from_text(to_text(d));
        CHECK(gmb_cardinality(back).probabilities() == gmb_cardinality(d).probabilities());
        Eigen::VectorXd x(1);
        for (double v = -3.0; v <= 3.0; v += 1.0) {
            x << v;
            CHECK(gmb_phd(back, x) == doctest::Approx(gmb_phd(d, x)).epsilon(1e-15));
        }

        const SoGmbDensity so = to_sogmb(d, SogmbOptions{0});
        const SoGmbDensity so_back = sogmb_from_text(to_text(so));
        CHECK(sogmb_cardinality(so_back).probabilities() ==
              sogmb_cardinality(so).probabilities());
    }
}

TEST_CASE("malformed density text is rejected") {
    CHECK_THROWS_AS(gmb_from_text("not a density\n"), SchemaError);
    CHECK_THROWS_AS(gmb_from_text("rfs-density gmb 1\nbogus 1\n"), SchemaError);
    CHECK_THROWS_AS(gmb_from_text("rfs-density sogmb 1\n"), SchemaError);
    CHECK_THROWS_AS(
        gmb_from_text("rfs-density gmb 1\nindexset 1 0\nhypothesis 0 1.0 1 0\ndensity 0 1\ng 1 1 0\n"),
        SchemaError);   // truncated gaussian record
}
