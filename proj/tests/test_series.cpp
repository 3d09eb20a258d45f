#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fracperc/series.hpp"
#include "fracperc/theory.hpp"

using namespace fracperc;

namespace {

ModelParams make_params(int d, int M, double p) {
    ModelParams P;
    P.d = d;
    P.M = M;
    P.p = p;
    return P;
}

SeriesOptions tight() {
    SeriesOptions o;
    o.tolerance = 1e-10;
    return o;
}

}  // namespace

TEST_CASE("spanning subset counts match direct enumeration") {
    using series_detail::spanning_subset_count;
    CHECK(spanning_subset_count(1, 2) == 1);
    CHECK(spanning_subset_count(2, 2) == 2);   // the two diagonals of a 2x2 block
    CHECK(spanning_subset_count(2, 3) == 4);   // every triple spans
    CHECK(spanning_subset_count(2, 4) == 1);
    CHECK(spanning_subset_count(3, 2) == 4);   // space diagonals of a cube
}

TEST_CASE("face class counts weight each lower-dimensional face correctly") {
    using series_detail::face_class_count;
    // d=2, M=2: four edges on interior lines, each carrying t=2 cell pairs
    CHECK(face_class_count(2, 2, 1, 2) == 4);
    CHECK(face_class_count(2, 2, 0, 2) == 2);  // the interior vertex, diagonal pairs
    CHECK(face_class_count(2, 2, 0, 3) == 4);
    CHECK(face_class_count(2, 2, 0, 4) == 1);
    CHECK(face_class_count(2, 2, 2, 2) == 0);  // no codimension-0 class exists
}

TEST_CASE("intersection terms reduce to closed forms at the boundary cases") {
    using series_detail::intersection_term;
    // full-dimensional faces: independent survival to level m of t cells
    CHECK(intersection_term(1, 1, 2, 0.7, 3, 2) == doctest::Approx(std::pow(0.7, 6)).epsilon(1e-14));
    CHECK(intersection_term(2, 2, 3, 0.6, 2, 4) == doctest::Approx(std::pow(0.6, 8)).epsilon(1e-14));
    // level zero: the face itself, with binomial intrinsic volumes
    CHECK(intersection_term(1, 0, 2, 0.7, 0, 2) == 1.0);
    CHECK(intersection_term(2, 0, 2, 0.7, 0, 2) == 1.0);
    CHECK(intersection_term(2, 1, 2, 0.7, 0, 3) == 2.0);
}

TEST_CASE("Monte Carlo intersection terms agree with the exact evaluator") {
    using series_detail::intersection_term;
    using series_detail::intersection_term_mc;
    struct Probe {
        int u, k, M;
        double p;
        int m, t;
    };
    const Probe probes[] = {{1, 0, 2, 0.7, 1, 2}, {1, 0, 2, 0.7, 2, 2}, {2, 0, 2, 0.7, 1, 2},
                            {2, 0, 2, 0.6, 2, 2}, {2, 1, 2, 0.7, 1, 2}, {2, 1, 3, 0.6, 1, 3}};
    for (const Probe& pr : probes) {
        double exact = intersection_term(pr.u, pr.k, pr.M, pr.p, pr.m, pr.t);
        auto est = intersection_term_mc(pr.u, pr.k, pr.M, pr.p, pr.m, pr.t, 40000, 555);
        INFO("u=", pr.u, " k=", pr.k, " m=", pr.m, " t=", pr.t);
        CHECK(std::abs(est.mean - exact) <= 5.0 * est.se + 1e-12);
    }
}

TEST_CASE("the top limit functional is exactly one") {
    for (int d : {1, 2, 3}) {
        ModelParams P = make_params(d, 2, 0.8);
        SeriesResult s = limit_functional_series(P, d, tight());
        CHECK(s.value == 1.0);
        CHECK(s.converged);
        CHECK(s.half_width == 0.0);
    }
}

TEST_CASE("the codimension-one limit functional reproduces the surface constant") {
    for (int d : {2, 3})
        for (int M : {2, 3})
            for (double p : {0.7, 0.9}) {
                ModelParams P = make_params(d, M, p);
                SeriesResult s = limit_functional_series(P, d - 1, tight());
                double c1 = surface_constants(P).c1;
                INFO("d=", d, " M=", M, " p=", p);
                CHECK(s.converged);
                CHECK(s.value == doctest::Approx(c1).epsilon(1e-8));
            }
}

TEST_CASE("the one-dimensional limit functional has a closed form") {
    // d=1, k=0: M (1-p) / (M-p)
    for (int M : {2, 3})
        for (double p : {0.6, 0.9}) {
            ModelParams P = make_params(1, M, p);
            SeriesResult s = limit_functional_series(P, 0, tight());
            CHECK(s.value == doctest::Approx(M * (1 - p) / (M - p)).epsilon(1e-8));
        }
}

TEST_CASE("limit functionals reproduce their frozen values") {
    CHECK(limit_functional_series(make_params(2, 2, 0.7), 1, tight()).value ==
          doctest::Approx(12.0 / 13.0).epsilon(1e-9));
    CHECK(limit_functional_series(make_params(2, 2, 0.7), 0, tight()).value ==
          doctest::Approx(0.006921077912436).epsilon(2e-9));
    CHECK(limit_functional_series(make_params(3, 2, 0.7), 1, tight()).value ==
          doctest::Approx(0.020763233737303).epsilon(2e-9));
    CHECK(limit_functional_series(make_params(3, 2, 0.7), 0, tight()).value ==
          doctest::Approx(-0.056824131187283).epsilon(2e-9));
    CHECK(limit_functional_series(make_params(2, 2, 0.9), 0, tight()).value ==
          doctest::Approx(-0.077029575971218).epsilon(2e-9));
    CHECK(limit_functional_series(make_params(2, 3, 0.7), 0, tight()).value ==
          doctest::Approx(-0.075688002053359).epsilon(2e-9));
}

TEST_CASE("full retention sends every lower functional to zero") {
    // term-by-term cancellation happens in floating point, so the residue is
    // rounding noise at the scale of the truncation tolerance, not exact zero
    for (int d : {1, 2, 3})
        for (int k = 0; k < d; ++k) {
            ModelParams P = make_params(d, 2, 1.0);
            SeriesResult s = limit_functional_series(P, k, tight());
            INFO("d=", d, " k=", k);
            CHECK(std::abs(s.value) <= 1e-9);
        }
}

TEST_CASE("truncation bounds are sound against a longer run") {
    ModelParams P = make_params(2, 2, 0.8);
    SeriesOptions coarse;
    coarse.tolerance = 1e-6;
    SeriesResult a = limit_functional_series(P, 0, coarse);
    SeriesOptions longer;
    longer.tolerance = 1e-13;
    longer.max_terms = 800;
    SeriesResult b = limit_functional_series(P, 0, longer);
    CHECK(a.converged);
    CHECK(std::abs(a.value - b.value) <= a.tail_bound + 1e-12);
}

TEST_CASE("the Monte Carlo budget cuts off early and reports it") {
    ModelParams P = make_params(2, 2, 0.7);
    SeriesOptions o;
    o.tolerance = 1e-10;
    o.mc_reps = 5000;
    o.mc_level_cap = 4;
    o.mc_total_budget = 20000;
    o.seed = 9;
    SeriesResult s = limit_functional_series(P, 0, o);
    CHECK(s.budget_exhausted);
    CHECK_FALSE(s.converged);
    CHECK(s.half_width > 0.0);
}

TEST_CASE("a sampled series still lands near the exact value") {
    ModelParams P = make_params(2, 2, 0.7);
    SeriesOptions o;
    o.tolerance = 1e-8;
    o.mc_reps = 20000;
    o.mc_level_cap = 2;
    o.seed = 12345;
    SeriesResult s = limit_functional_series(P, 0, o);
    SeriesResult exact = limit_functional_series(P, 0, tight());
    CHECK(s.mc_se > 0.0);
    CHECK(std::abs(s.value - exact.value) <= s.half_width + 4.0 * s.mc_se);
}

TEST_CASE("limit covariances factor through the limit functionals") {
    ModelParams P = make_params(2, 2, 0.8);
    std::vector<double> vbar = limit_functionals(P, tight());
    REQUIRE(vbar.size() == 3);
    auto cov = limit_covariance(P, vbar);
    double varw = (1.0 - P.p) / (P.branching() * P.p - 1.0);
    CHECK(cov[2][2] == doctest::Approx(varw).epsilon(1e-12));
    CHECK(cov[1][1] == doctest::Approx(4.0 / 99.0).epsilon(1e-6));
    CHECK(cov[1][2] == doctest::Approx(vbar[1] * varw).epsilon(1e-12));
    ModelParams sub = make_params(2, 2, 0.2);
    CHECK_THROWS_AS(limit_covariance(sub, vbar), ConfigError);
}

TEST_CASE("series requests outside the supported range are refused") {
    ModelParams P = make_params(2, 2, 0.8);
    CHECK_THROWS_AS(limit_functional_series(P, 3, tight()), ConfigError);
    CHECK_THROWS_AS(limit_functional_series(P, -1, tight()), ConfigError);
}
