#include "fracperc/stats.hpp"

#include <algorithm>
#include <cmath>

#include "fracperc/rng.hpp"

namespace fracperc {

StreamingMoments::StreamingMoments(int width) : w_(width) {
    if (width < 1) throw ConfigError("accumulator width must be >= 1");
    mean_.assign(std::size_t(w_), 0.0);
    m2_.assign(std::size_t(w_) * std::size_t(w_), 0.0);
    m3_.assign(std::size_t(w_), 0.0);
    m4_.assign(std::size_t(w_), 0.0);
}

void StreamingMoments::push(const double* x) {
    const double n1 = double(n_);
    ++n_;
    const double n = double(n_);
    std::vector<double> delta(static_cast<std::size_t>(w_)), dn(static_cast<std::size_t>(w_));
    for (int i = 0; i < w_; ++i) {
        delta[std::size_t(i)] = x[i] - mean_[std::size_t(i)];
        dn[std::size_t(i)] = delta[std::size_t(i)] / n;
    }
    for (int i = 0; i < w_; ++i) {
        const double d = delta[std::size_t(i)], dni = dn[std::size_t(i)];
        const double term1 = d * dni * n1;
        const double m2ii = m2_[std::size_t(i) * std::size_t(w_) + std::size_t(i)];
        m4_[std::size_t(i)] += term1 * dni * dni * (n * n - 3.0 * n + 3.0) +
                               6.0 * dni * dni * m2ii - 4.0 * dni * m3_[std::size_t(i)];
        m3_[std::size_t(i)] += term1 * dni * (n - 2.0) - 3.0 * dni * m2ii;
    }
    for (int i = 0; i < w_; ++i)
        for (int j = 0; j < w_; ++j)
            m2_[std::size_t(i) * std::size_t(w_) + std::size_t(j)] +=
                delta[std::size_t(i)] * delta[std::size_t(j)] * n1 / n;
    for (int i = 0; i < w_; ++i) mean_[std::size_t(i)] += dn[std::size_t(i)];
}

void StreamingMoments::merge(const StreamingMoments& o) {
    if (o.w_ != w_) throw ConfigError("cannot merge accumulators of different widths");
    if (o.n_ == 0) return;
    if (n_ == 0) { *this = o; return; }
    const double na = double(n_), nb = double(o.n_), n = na + nb;
    std::vector<double> delta(static_cast<std::size_t>(w_));
    for (int i = 0; i < w_; ++i) delta[std::size_t(i)] = o.mean_[std::size_t(i)] - mean_[std::size_t(i)];
    for (int i = 0; i < w_; ++i) {
        const double d = delta[std::size_t(i)];
        const double m2a = m2_[std::size_t(i) * std::size_t(w_) + std::size_t(i)];
        const double m2b = o.m2_[std::size_t(i) * std::size_t(w_) + std::size_t(i)];
        m4_[std::size_t(i)] += o.m4_[std::size_t(i)] +
                               d * d * d * d * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                               6.0 * d * d * (na * na * m2b + nb * nb * m2a) / (n * n) +
                               4.0 * d * (na * o.m3_[std::size_t(i)] - nb * m3_[std::size_t(i)]) / n;
        m3_[std::size_t(i)] += o.m3_[std::size_t(i)] +
                               d * d * d * na * nb * (na - nb) / (n * n) +
                               3.0 * d * (na * m2b - nb * m2a) / n;
    }
    for (int i = 0; i < w_; ++i)
        for (int j = 0; j < w_; ++j)
            m2_[std::size_t(i) * std::size_t(w_) + std::size_t(j)] +=
                o.m2_[std::size_t(i) * std::size_t(w_) + std::size_t(j)] +
                delta[std::size_t(i)] * delta[std::size_t(j)] * na * nb / n;
    for (int i = 0; i < w_; ++i) mean_[std::size_t(i)] += delta[std::size_t(i)] * nb / n;
    n_ += o.n_;
}

double StreamingMoments::mean(int i) const { return mean_[std::size_t(i)]; }

double StreamingMoments::variance(int i) const {
    if (n_ < 2) return 0.0;
    return m2_[std::size_t(i) * std::size_t(w_) + std::size_t(i)] / double(n_ - 1);
}

double StreamingMoments::covariance(int i, int j) const {
    if (n_ < 2) return 0.0;
    return m2_[std::size_t(i) * std::size_t(w_) + std::size_t(j)] / double(n_ - 1);
}

double StreamingMoments::correlation(int i, int j) const {
    double denom = std::sqrt(variance(i) * variance(j));
    if (denom == 0.0) return 0.0;
    return covariance(i, j) / denom;
}

double StreamingMoments::central4(int i) const {
    if (n_ < 1) return 0.0;
    return m4_[std::size_t(i)] / double(n_);
}

double StreamingMoments::mean_se(int i) const {
    if (n_ < 2) return 0.0;
    return std::sqrt(variance(i) / double(n_));
}

double StreamingMoments::variance_se(int i) const {
    if (n_ < 4) return 0.0;
    const double n = double(n_);
    const double s2 = variance(i);
    const double m4 = central4(i);
    double v = (m4 - (n - 3.0) / (n - 1.0) * s2 * s2) / n;
    return std::sqrt(std::max(0.0, v));
}

double cv_squared(const std::vector<double>& sample) {
    if (sample.size() < 2) throw ConfigError("need at least two samples");
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= double(sample.size());
    if (mean == 0.0) throw ConfigError("degenerate sample mean");
    double ss = 0.0;
    for (double v : sample) ss += (v - mean) * (v - mean);
    double var = ss / double(sample.size() - 1);
    return var / (mean * mean);
}

BootstrapCI bootstrap_ci(const std::vector<double>& sample, int resamples, double level,
                         std::uint64_t seed,
                         const std::function<double(const std::vector<double>&)>& stat) {
    if (sample.empty()) throw ConfigError("empty sample");
    if (resamples < 10) throw ConfigError("need at least 10 resamples");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must be in (0,1)");
    BootstrapCI ci;
    ci.point = stat(sample);
    const std::size_t n = sample.size();
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<double> resample(n);
    for (int b = 0; b < resamples; ++b) {
        std::uint64_t key = rng::replication_seed(seed, std::uint64_t(b));
        for (std::size_t i = 0; i < n; ++i) {
            key = rng::mix(key + 0x9e3779b97f4a7c15ull);
            resample[i] = sample[key % n];
        }
        stats[std::size_t(b)] = stat(resample);
    }
    std::sort(stats.begin(), stats.end());
    double alpha = (1.0 - level) / 2.0;
    auto pick = [&](double q) {
        double idx = q * double(resamples - 1);
        std::size_t lo = std::size_t(idx);
        std::size_t hi = std::min(lo + 1, std::size_t(resamples - 1));
        double f = idx - double(lo);
        return stats[lo] * (1.0 - f) + stats[hi] * f;
    };
    ci.lo = pick(alpha);
    ci.hi = pick(1.0 - alpha);
    return ci;
}

namespace {

// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw ConfigError("invalid incomplete gamma arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // series for P(a,x), then complement
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return 1.0 - p;
    }
    // continued fraction for Q(a,x)
    double b = x + 1.0 - a, c = 1e308, dd = 1.0 / b, h = dd;
    for (int i = 1; i <= 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < 1e-300) dd = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        dd = 1.0 / dd;
        double del = dd * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_tail(double statistic, int df) {
    if (df < 1) throw ConfigError("degrees of freedom must be >= 1");
    if (statistic <= 0.0) return 1.0;
    return gamma_q(double(df) / 2.0, statistic / 2.0);
}

GofResult two_sample_chi_square(const std::vector<std::int64_t>& a,
                                const std::vector<std::int64_t>& b, double min_expected) {
    if (a.size() != b.size() || a.empty()) throw ConfigError("histograms must have equal size");
    double ka = 0.0, kb = 0.0;
    for (std::int64_t v : a) ka += double(v);
    for (std::int64_t v : b) kb += double(v);
    if (ka == 0.0 || kb == 0.0) throw ConfigError("empty histogram");
    const double total = ka + kb;
    // pool adjacent categories until both pooled expected counts are large
    std::vector<std::pair<double, double>> bins;
    double ca = 0.0, cb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca += double(a[i]);
        cb += double(b[i]);
        double pooled = ca + cb;
        if (ka * pooled / total >= min_expected && kb * pooled / total >= min_expected) {
            bins.emplace_back(ca, cb);
            ca = cb = 0.0;
        }
    }
    if (ca + cb > 0.0) {
        if (!bins.empty()) {
            bins.back().first += ca;
            bins.back().second += cb;
        } else {
            bins.emplace_back(ca, cb);
        }
    }
    GofResult r;
    if (bins.size() < 2) throw ConfigError("too few categories after pooling");
    for (auto& [oa, ob] : bins) {
        double pooled = oa + ob;
        double ea = ka * pooled / total;
        double eb = kb * pooled / total;
        r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
    }
    r.df = int(bins.size()) - 1;
    r.p_value = chi_square_tail(r.statistic, r.df);
    return r;
}

}  // namespace fracperc
