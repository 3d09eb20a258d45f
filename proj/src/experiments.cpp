#include "fracperc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "fracperc/generate.hpp"
#include "fracperc/minkowski.hpp"
#include "fracperc/rng.hpp"

namespace fracperc {

double rescale_factor(const ModelParams& params, int k, int n) {
    double log_f = double(n) * (double(k - params.d) * std::log(double(params.M)) -
                                std::log(params.p));
    return std::exp(log_f);
}

int worker_count() {
    if (const char* env = std::getenv("FRACPERC_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

namespace {

constexpr int kChunks = 256;

struct ChunkState {
    std::vector<StreamingMoments> levels;
    std::int64_t extinct = 0;
};

}  // namespace

RunResult run(const ReplicationPlan& plan) {
    const ModelParams& P = plan.params;
    P.validate();
    if (plan.reps < 1) throw ConfigError("replication count must be positive");
    const int L = P.n_max;
    const int d = P.d;
    const int width = 2 * (d + 1);
    const unsigned mask = plan.k_mask & ((1u << (d + 1)) - 1u);
    const std::int64_t R = plan.reps;

    std::vector<ChunkState> chunks(kChunks);
    for (auto& c : chunks) c.levels.assign(std::size_t(L) + 1, StreamingMoments(width));
    RunResult out;
    out.reps = R;
    if (plan.record_trajectories) out.trajectories.resize(std::size_t(R));

    // Precompute the rescale multipliers once; every replication shares them.
    std::vector<std::array<double, 4>> factor(std::size_t(L) + 1);
    for (int n = 0; n <= L; ++n)
        for (int k = 0; k <= d; ++k)
            factor[std::size_t(n)][std::size_t(k)] = rescale_factor(P, k, n);

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto work = [&]() {
        std::vector<double> row(static_cast<std::size_t>(width));
        try {
            for (;;) {
                int c = next.fetch_add(1);
                if (c >= kChunks || failed.load()) break;
                std::int64_t lo = R * c / kChunks;
                std::int64_t hi = R * (c + 1) / kChunks;
                ChunkState& acc = chunks[std::size_t(c)];
                for (std::int64_t r = lo; r < hi; ++r) {
                    ModelParams Q = P;
                    std::uint64_t s = rng::replication_seed(P.seed, std::uint64_t(r));
                    Realization real;
                    for (int attempt = 0;; ++attempt) {
                        Q.seed = s;
                        real = generate(Q);
                        if (!plan.condition_nonextinct || real.counts[std::size_t(L)] > 0) break;
                        if (attempt >= 1000000)
                            throw ConfigError("no surviving realization found while conditioning");
                        s = rng::mix(s + 0x9e3779b97f4a7c15ull);
                    }
                    bool extinct = real.counts[std::size_t(L)] == 0;
                    if (extinct) ++acc.extinct;
                    TrajectoryRecord* rec = nullptr;
                    if (plan.record_trajectories) {
                        rec = &out.trajectories[std::size_t(r)];
                        rec->extinct = extinct;
                        rec->z.assign(std::size_t(L) + 1, {0.0, 0.0, 0.0, 0.0});
                    }
                    for (int n = 0; n <= L; ++n) {
                        MinkowskiVector v = intrinsic_selected(real.grids[std::size_t(n)], mask);
                        for (int k = 0; k <= d; ++k) {
                            double raw = v.values[std::size_t(k)];
                            double z = raw * factor[std::size_t(n)][std::size_t(k)];
                            row[std::size_t(k)] = raw;
                            row[std::size_t(d + 1 + k)] = z;
                            if (rec) rec->z[std::size_t(n)][std::size_t(k)] = z;
                        }
                        acc.levels[std::size_t(n)].push(row.data());
                    }
                }
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    int workers = std::min(worker_count(), kChunks);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    out.levels.assign(std::size_t(L) + 1, StreamingMoments(width));
    for (const auto& c : chunks) {
        for (int n = 0; n <= L; ++n) out.levels[std::size_t(n)].merge(c.levels[std::size_t(n)]);
        out.extinct_final += c.extinct;
    }
    return out;
}

ResidualReport factorization_check(const std::vector<TrajectoryRecord>& trajectories,
                                   const std::vector<double>& vbar, int k, double threshold,
                                   int from_level) {
    ResidualReport rep;
    rep.k = k;
    if (trajectories.empty()) throw ConfigError("no trajectories recorded");
    const int L = int(trajectories.front().z.size()) - 1;
    if (k < 0 || std::size_t(k) >= vbar.size()) throw ConfigError("functional index out of range");
    if (from_level < 0 || from_level > L) throw ConfigError("level out of range");
    std::vector<double> finals;
    finals.reserve(trajectories.size());
    std::int64_t inside = 0;
    int d = int(vbar.size()) - 1;
    for (const auto& t : trajectories) {
        if (!t.extinct) ++rep.surviving;
        bool enveloped = true;
        double r_final = 0.0;
        for (int n = 0; n <= L; ++n) {
            double r = t.z[std::size_t(n)][std::size_t(k)] -
                       vbar[std::size_t(k)] * t.z[std::size_t(n)][std::size_t(d)];
            if (n >= from_level && std::abs(r) > threshold) enveloped = false;
            if (n == L) r_final = r;
        }
        if (enveloped) ++inside;
        finals.push_back(std::abs(r_final));
        rep.max_abs_final = std::max(rep.max_abs_final, std::abs(r_final));
    }
    std::sort(finals.begin(), finals.end());
    std::size_t m = finals.size();
    rep.median_abs_final = m % 2 ? finals[m / 2] : 0.5 * (finals[m / 2 - 1] + finals[m / 2]);
    rep.envelope_fraction = double(inside) / double(m);
    return rep;
}

std::vector<CvCheck> cv_limit_check(const std::vector<TrajectoryRecord>& trajectories,
                                    const ModelParams& params, unsigned k_mask, int resamples,
                                    double level, std::uint64_t seed) {
    if (trajectories.empty()) throw ConfigError("no trajectories recorded");
    if (!params.supercritical())
        throw ConfigError("limit moments need M^d p > 1");
    const int d = params.d;
    const int L = int(trajectories.front().z.size()) - 1;
    double target = (1.0 - params.p) / (params.branching() * params.p - 1.0);
    std::vector<CvCheck> out;
    for (int k = 0; k <= d; ++k) {
        if (!(k_mask & (1u << k))) continue;
        CvCheck chk;
        chk.k = k;
        chk.target = target;
        std::vector<double> sample;
        sample.reserve(trajectories.size());
        for (const auto& t : trajectories) sample.push_back(t.z[std::size_t(L)][std::size_t(k)]);
        try {
            chk.statistic = cv_squared(sample);
            chk.ci = bootstrap_ci(sample, resamples, level, seed + std::uint64_t(k),
                                  [](const std::vector<double>& s) { return cv_squared(s); });
        } catch (const ConfigError&) {
            chk.degenerate = true;
        }
        out.push_back(chk);
    }
    return out;
}

std::vector<double> correlation_check(const StreamingMoments& level_acc, int d) {
    if (level_acc.width() != 2 * (d + 1)) throw ConfigError("accumulator width mismatch");
    std::vector<double> corr(std::size_t(d + 1) * std::size_t(d + 1),
                             std::numeric_limits<double>::quiet_NaN());
    for (int k = 0; k <= d; ++k)
        for (int l = 0; l <= d; ++l) {
            if (level_acc.variance(d + 1 + k) == 0.0 || level_acc.variance(d + 1 + l) == 0.0)
                continue;
            corr[std::size_t(k) * std::size_t(d + 1) + std::size_t(l)] =
                level_acc.correlation(d + 1 + k, d + 1 + l);
        }
    return corr;
}

RateFit rate_fit(const std::vector<int>& levels, const std::vector<double>& gaps,
                 const std::vector<double>& ses) {
    RateFit fit;
    if (levels.size() != gaps.size() || (!ses.empty() && ses.size() != gaps.size()))
        throw ConfigError("rate fit inputs must align");
    std::vector<char> usable(gaps.size(), 0);
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        bool good = gaps[i] > 0.0;
        if (good && !ses.empty()) good = gaps[i] > 3.0 * ses[i];
        usable[i] = good ? 1 : 0;
        if (!good) ++fit.dropped;
    }
    // Longest consecutive run of usable levels.
    std::size_t best_lo = 0, best_len = 0, lo = 0;
    for (std::size_t i = 0; i <= usable.size(); ++i) {
        if (i < usable.size() && usable[i]) continue;
        if (i - lo > best_len) {
            best_len = i - lo;
            best_lo = lo;
        }
        lo = i + 1;
    }
    if (best_len < 4) {
        fit.diagnostic = "fewer than 4 consecutive usable gap levels";
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = best_lo; i < best_lo + best_len; ++i) {
        double x = double(levels[i]);
        double y = std::log(gaps[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double m = double(best_len);
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.rate = std::exp(slope);
    fit.log_intercept = (sy - slope * sx) / m;
    fit.levels_used = int(best_len);
    fit.ok = true;
    if (fit.dropped > 0)
        fit.diagnostic = std::to_string(fit.dropped) +
                         " level(s) dropped as non-positive or below the noise floor";
    return fit;
}

}  // namespace fracperc
