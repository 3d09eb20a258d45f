#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "fracperc/params.hpp"
#include "fracperc/rng.hpp"

using namespace fracperc;

TEST_CASE("parameter validation rejects out-of-range fields") {
    ModelParams p;
    p.validate();
    ModelParams bad = p;
    bad.d = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.d = 4;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.M = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.p = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.p = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.n_max = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = p;
    bad.cell_budget = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("similarity dimension and branching number match hand values") {
    ModelParams p;
    p.d = 2;
    p.M = 2;
    p.p = 0.7;
    CHECK(p.dimension() == doctest::Approx(1.4854268271702415).epsilon(1e-14));
    CHECK(p.branching() == 4);
    p.d = 3;
    p.M = 3;
    p.p = 0.2;
    CHECK(p.dimension() == doctest::Approx(1.5350264792820729).epsilon(1e-14));
    CHECK(p.branching() == 27);
}

TEST_CASE("criticality test is strict at the boundary") {
    ModelParams p;
    p.d = 2;
    p.M = 2;
    p.p = 0.25;
    CHECK_FALSE(p.supercritical());
    p.p = 0.2500001;
    CHECK(p.supercritical());
    p.p = 1.0;
    CHECK(p.supercritical());
}

TEST_CASE("integer powers guard against 64-bit overflow") {
    CHECK(ipow64(3, 0) == 1);
    CHECK(ipow64(3, 4) == 81);
    CHECK(ipow64(2, 62) == std::int64_t(1) << 62);
    CHECK_THROWS_AS(ipow64(2, 63), CapacityError);
    CHECK_THROWS_AS(ipow64(10, 20), CapacityError);
}

TEST_CASE("the key mixer matches its frozen reference values") {
    CHECK(rng::mix(0) == 0x67dbe5218c989cd1ull);
    CHECK(rng::mix(1) == 0x498feef67ded2cb0ull);
    CHECK(rng::mix(42) == 0x19df61434b4e2006ull);
    CHECK(rng::root_key(7) == 0x8a7e669db8f9d048ull);
    CHECK(rng::uniform(rng::root_key(7)) == doctest::Approx(0.28486246845986363).epsilon(1e-16));
}

TEST_CASE("uniform draws stay in the half-open unit interval") {
    std::uint64_t k = 1;
    for (int i = 0; i < 10000; ++i) {
        k = rng::mix(k);
        double u = rng::uniform(k);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("child keys of one parent are pairwise distinct") {
    std::uint64_t parent = rng::root_key(123);
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(rng::child_key(parent, i));
    CHECK(seen.size() == 1000);
}

TEST_CASE("replication seeds decorrelate master seed and index") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 30; ++m)
        for (std::uint64_t r = 0; r < 30; ++r) seen.insert(rng::replication_seed(m, r));
    CHECK(seen.size() == 900);
    CHECK(rng::replication_seed(5, 9) == rng::replication_seed(5, 9));
}
