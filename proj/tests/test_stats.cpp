#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "fracperc/rng.hpp"
#include "fracperc/stats.hpp"

using namespace fracperc;

namespace {

std::vector<std::vector<double>> synthetic_rows(int n, int w, std::uint64_t seed) {
    std::vector<std::vector<double>> rows;
    std::uint64_t k = seed;
    for (int i = 0; i < n; ++i) {
        std::vector<double> r(static_cast<std::size_t>(w));
        for (int j = 0; j < w; ++j) {
            k = rng::mix(k);
            double u = rng::uniform(k);
            r[std::size_t(j)] = (j == 0) ? u : u * u + 0.3 * r[0];
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

TEST_CASE("moments of a tiny known sample come out exactly") {
    StreamingMoments acc(1);
    for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) acc.push(&x);
    CHECK(acc.count() == 8);
    CHECK(acc.mean(0) == doctest::Approx(5.0).epsilon(1e-15));
    // unbiased sample variance of the classic eight-point set
    CHECK(acc.variance(0) == doctest::Approx(32.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("covariance and correlation recover a linear relation") {
    StreamingMoments acc(2);
    for (int i = 0; i < 50; ++i) {
        double row[2] = {double(i), 3.0 * i + 1.0};
        acc.push(row);
    }
    CHECK(acc.covariance(0, 1) == doctest::Approx(3.0 * acc.variance(0)).epsilon(1e-12));
    CHECK(acc.correlation(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(acc.correlation(0, 0) == 1.0);
}

TEST_CASE("merging chunked accumulators equals one sequential pass") {
    auto rows = synthetic_rows(1000, 3, 31);
    StreamingMoments whole(3);
    for (const auto& r : rows) whole.push(r);
    for (std::size_t cut : {std::size_t(1), std::size_t(250), std::size_t(999)}) {
        StreamingMoments a(3), b(3);
        for (std::size_t i = 0; i < cut; ++i) a.push(rows[i]);
        for (std::size_t i = cut; i < rows.size(); ++i) b.push(rows[i]);
        a.merge(b);
        CHECK(a.count() == whole.count());
        for (int j = 0; j < 3; ++j) {
            CHECK(a.mean(j) == doctest::Approx(whole.mean(j)).epsilon(1e-10));
            CHECK(a.variance(j) == doctest::Approx(whole.variance(j)).epsilon(1e-10));
            CHECK(a.central4(j) == doctest::Approx(whole.central4(j)).epsilon(1e-9));
        }
        CHECK(a.covariance(0, 2) == doctest::Approx(whole.covariance(0, 2)).epsilon(1e-10));
    }
}

TEST_CASE("merging an empty accumulator changes nothing") {
    StreamingMoments acc(2), empty(2);
    double row[2] = {1.5, -2.0};
    acc.push(row);
    row[0] = 2.5;
    acc.push(row);
    double m0 = acc.mean(0), v1 = acc.variance(1);
    acc.merge(empty);
    CHECK(acc.mean(0) == m0);
    CHECK(acc.variance(1) == v1);
    empty.merge(acc);
    CHECK(empty.count() == 2);
    CHECK(empty.mean(0) == m0);
}

TEST_CASE("a constant stream has zero variance and zero standard errors") {
    StreamingMoments acc(1);
    for (int i = 0; i < 100; ++i) {
        double x = 3.25;
        acc.push(&x);
    }
    CHECK(acc.variance(0) == 0.0);
    CHECK(acc.mean_se(0) == 0.0);
    CHECK(acc.variance_se(0) == 0.0);
}

TEST_CASE("the variance standard error tracks a normal sample") {
    // for a normal sample, se(s^2) is about s^2 sqrt(2/(n-1))
    StreamingMoments acc(1);
    std::uint64_t k = 7;
    int n = 20000;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < 12; ++j) {
            k = rng::mix(k);
            s += rng::uniform(k);
        }
        double x = s - 6.0;  // near-normal, mean 0, variance 1
        acc.push(&x);
    }
    double expect = acc.variance(0) * std::sqrt(2.0 / (n - 1));
    CHECK(acc.variance_se(0) == doctest::Approx(expect).epsilon(0.1));
}

TEST_CASE("the squared coefficient of variation has its textbook value") {
    std::vector<double> s = {1.0, 3.0};
    CHECK(cv_squared(s) == doctest::Approx(0.5).epsilon(1e-14));
    std::vector<double> zero_mean = {-1.0, 1.0};
    CHECK_THROWS_AS(cv_squared(zero_mean), ConfigError);
}

TEST_CASE("chi-square tail probabilities match reference values") {
    CHECK(chi_square_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(chi_square_tail(4.605170185988091, 2) == doctest::Approx(0.1).epsilon(1e-8));
    CHECK(chi_square_tail(18.307038053275146, 10) == doctest::Approx(0.05).epsilon(1e-5));
    CHECK(chi_square_tail(0.0, 3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the bootstrap interval brackets the point estimate deterministically") {
    std::vector<double> sample;
    std::uint64_t k = 55;
    for (int i = 0; i < 400; ++i) {
        k = rng::mix(k);
        sample.push_back(rng::uniform(k) + 0.5);
    }
    auto mean_stat = [](const std::vector<double>& s) {
        double t = 0.0;
        for (double x : s) t += x;
        return t / double(s.size());
    };
    BootstrapCI a = bootstrap_ci(sample, 500, 0.95, 42, mean_stat);
    BootstrapCI b = bootstrap_ci(sample, 500, 0.95, 42, mean_stat);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.lo <= a.point);
    CHECK(a.point <= a.hi);
    CHECK(a.point == doctest::Approx(mean_stat(sample)).epsilon(1e-14));
    // the interval should be realistically narrow for 400 uniforms
    CHECK(a.hi - a.lo < 0.1);
    CHECK(a.hi - a.lo > 0.01);
}

TEST_CASE("identical histograms pass the two-sample test outright") {
    std::vector<std::int64_t> h = {100, 200, 300, 150, 50};
    GofResult g = two_sample_chi_square(h, h);
    CHECK(g.statistic == 0.0);
    CHECK(g.p_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.df == 4);
}

TEST_CASE("sparse categories pool until expectations are large enough") {
    std::vector<std::int64_t> a = {500, 2, 1, 0, 600};
    std::vector<std::int64_t> b = {480, 1, 2, 2, 610};
    GofResult g = two_sample_chi_square(a, b);
    CHECK(g.df < 4);
    CHECK(g.p_value > 0.01);
    std::vector<std::int64_t> tiny = {1, 0};
    std::vector<std::int64_t> tiny2 = {0, 1};
    CHECK_THROWS_AS(two_sample_chi_square(tiny, tiny2), ConfigError);
}

TEST_CASE("clearly different histograms are rejected") {
    std::vector<std::int64_t> a = {1000, 1000, 1000};
    std::vector<std::int64_t> b = {1500, 1000, 500};
    GofResult g = two_sample_chi_square(a, b);
    CHECK(g.p_value < 1e-6);
}
