#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fracperc/params.hpp"

namespace fracperc {

/// Single-pass accumulator for a fixed-width vector stream: running means,
/// centered co-moment matrix, and univariate third and fourth central sums.
/// Merging two accumulators reproduces accumulation of the concatenated
/// stream, so chunked parallel runs are order-independent.
class StreamingMoments {
  public:
    StreamingMoments() = default;
    explicit StreamingMoments(int width);

    void push(const double* x);
    void push(const std::vector<double>& x) { push(x.data()); }
    void merge(const StreamingMoments& other);

    int width() const { return w_; }
    std::int64_t count() const { return n_; }
    double mean(int i) const;
    double variance(int i) const;           // unbiased
    double covariance(int i, int j) const;  // unbiased
    double correlation(int i, int j) const;
    double central4(int i) const;           // fourth central moment (biased, /n)
    // standard error of the sample mean
    double mean_se(int i) const;
    // large-sample standard error of the unbiased sample variance
    double variance_se(int i) const;

  private:
    int w_ = 0;
    std::int64_t n_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;  // co-moment matrix, row-major w x w
    std::vector<double> m3_;
    std::vector<double> m4_;
};

struct BootstrapCI {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap confidence interval for a statistic of one sample.
BootstrapCI bootstrap_ci(const std::vector<double>& sample, int resamples, double level,
                         std::uint64_t seed, const std::function<double(const std::vector<double>&)>& stat);

// Squared coefficient of variation, variance / mean^2.
double cv_squared(const std::vector<double>& sample);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_tail(double statistic, int df);

/// Two-sample goodness-of-fit on category counts (equal-width histograms).
struct GofResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 0.0;
};

// Pearson two-sample test; adjacent categories are pooled until each pooled
// expected count reaches min_expected.
GofResult two_sample_chi_square(const std::vector<std::int64_t>& a,
                                const std::vector<std::int64_t>& b, double min_expected = 5.0);

}  // namespace fracperc
