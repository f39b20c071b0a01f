#include <catch2/catch_amalgamated.hpp>

#include <crn/model.hpp>
#include <crn/rng.hpp>

using namespace crn;

namespace {
SystemSpec paper_single() {
    return {Topology::single_su(), {0.3, 0.4, 0.7, 0.7}, {1.0, 1.0},
            AccessMode::Cooperative};
}
} // namespace

TEST_CASE("cluster_boost reference values") {
    CHECK(cluster_boost(0.4, 1) == 0.4);
    CHECK_THAT(cluster_boost(0.4, 2), Catch::Matchers::WithinAbs(0.64, 1e-15));
    CHECK(cluster_boost(0.0, 7) == 0.0);
    CHECK(cluster_boost(1.0, 3) == 1.0);
}

TEST_CASE("cluster_boost rejects bad arguments") {
    CHECK_THROWS_AS(cluster_boost(0.4, 0), std::invalid_argument);
    CHECK_THROWS_AS(cluster_boost(1.2, 2), std::invalid_argument);
    CHECK_THROWS_AS(cluster_boost(-0.1, 2), std::invalid_argument);
}

TEST_CASE("cluster_boost identity, monotonicity, saturation") {
    // identity at k = 1 over a deterministic sweep of p
    for (int i = 0; i <= 100; ++i) {
        const double p = i / 100.0;
        CHECK(cluster_boost(p, 1) == p);
    }
    // monotone in k and p, and bounded by [p, 1]
    for (int i = 0; i < 200; ++i) {
        const double p = rng::uniform(42, i, 0);
        const int k1 = 1 + rng::uniform_int(8, 42, i, 1);
        const int k2 = k1 + rng::uniform_int(8, 42, i, 2);
        const double b1 = cluster_boost(p, k1);
        const double b2 = cluster_boost(p, k2);
        CHECK(b1 >= p);
        CHECK(b2 >= b1);
        CHECK(b2 <= 1.0);
    }
    CHECK(cluster_boost(0.4, 64) > 0.999999);
}

TEST_CASE("validate flags each violated field by name") {
    SystemSpec s = paper_single();
    s.links.p_pspd = 1.2;
    auto errs = validation_errors(s);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("p_pspd") != std::string::npos);
    CHECK_THROWS_WITH(validate(s), Catch::Matchers::ContainsSubstring("p_pspd"));

    SystemSpec c = paper_single();
    c.topology = Topology::cluster(0);
    auto errs2 = validation_errors(c);
    REQUIRE(errs2.size() == 1);
    CHECK(errs2[0].find("topology") != std::string::npos);
}

TEST_CASE("validate returns a valid spec unchanged") {
    SystemSpec s = paper_single();
    const SystemSpec& out = validate(s);
    CHECK(&out == &s);
    CHECK(validation_errors(s).empty());
}

TEST_CASE("counter rng is deterministic and uniform-ish") {
    CHECK(rng::uniform(1, 2, 3) == rng::uniform(1, 2, 3));
    CHECK(rng::uniform(1, 2, 3) != rng::uniform(1, 2, 4));
    double acc = 0.0;
    for (int i = 0; i < 10000; ++i)
        acc += rng::uniform(7, i, 0);
    CHECK_THAT(acc / 10000.0, Catch::Matchers::WithinAbs(0.5, 0.02));
}
