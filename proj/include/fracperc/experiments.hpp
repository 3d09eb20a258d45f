#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fracperc/params.hpp"
#include "fracperc/stats.hpp"

namespace fracperc {

struct ReplicationPlan {
    ModelParams params;
    std::int64_t reps = 1;
    // Bits select which V_k to evaluate per level; unselected entries are
    // accumulated as zeros.
    unsigned k_mask = 0xFu;
    bool record_trajectories = false;
    // Redraw replications that die out before the deepest level, so every
    // recorded trajectory survives. Off by default: the limit moments include
    // the extinction atom.
    bool condition_nonextinct = false;
};

// One replication's rescaled trajectory: z[n][k] = M^((k-D)n) V_k(F_n).
// The k = d column is W_n = N_n / (M^d p)^n; it is produced by the same
// arithmetic as the factorization reference, so its residual is exactly zero.
struct TrajectoryRecord {
    std::vector<std::array<double, 4>> z;
    bool extinct = false;
};

struct RunResult {
    // One accumulator per level 0..n_max, width 2(d+1): the raw functionals
    // V_0..V_d followed by the rescaled Z_0..Z_d.
    std::vector<StreamingMoments> levels;
    std::vector<TrajectoryRecord> trajectories;
    std::int64_t extinct_final = 0;
    std::int64_t reps = 0;
};

// Multiplier turning V_k(F_n) into Z_n[k], evaluated in log space.
double rescale_factor(const ModelParams& params, int k, int n);

// Worker count used by run(): FRACPERC_THREADS if set, else the hardware
// concurrency, at least 1.
int worker_count();

// Runs plan.reps independent realizations; replication r uses the seed
// rng::replication_seed(params.seed, r). Work is split into 256 fixed chunks
// whose accumulators merge in chunk order, so results do not depend on the
// worker count.
RunResult run(const ReplicationPlan& plan);

// Residuals r_n = Z_n[k] - vbar[k] * W_n across recorded trajectories.
struct ResidualReport {
    int k = 0;
    double max_abs_final = 0.0;
    double median_abs_final = 0.0;
    // Fraction of trajectories with |r_n| <= threshold for every
    // n >= from_level.
    double envelope_fraction = 0.0;
    std::int64_t surviving = 0;
};

ResidualReport factorization_check(const std::vector<TrajectoryRecord>& trajectories,
                                   const std::vector<double>& vbar, int k, double threshold,
                                   int from_level);

// Squared coefficient of variation of Z_{n_max}[k] against the limit value
// (1-p)/(M^d p - 1), with a percentile bootstrap interval.
struct CvCheck {
    int k = 0;
    double statistic = 0.0;
    BootstrapCI ci;
    double target = 0.0;
    bool degenerate = false;
};

std::vector<CvCheck> cv_limit_check(const std::vector<TrajectoryRecord>& trajectories,
                                    const ModelParams& params, unsigned k_mask, int resamples,
                                    double level, std::uint64_t seed);

// Pairwise sample correlations of Z_n[0..d] from one level accumulator,
// returned row-major (d+1) x (d+1). Zero-variance entries come back NaN.
std::vector<double> correlation_check(const StreamingMoments& level_acc, int d);

// Least-squares fit of log(gap) against the level index on the longest
// consecutive run of usable gaps. A gap is usable when positive and, if a
// standard error is supplied, larger than 3 of them.
struct RateFit {
    double rate = 0.0;
    double log_intercept = 0.0;
    int levels_used = 0;
    int dropped = 0;
    bool ok = false;
    std::string diagnostic;
};

RateFit rate_fit(const std::vector<int>& levels, const std::vector<double>& gaps,
                 const std::vector<double>& ses = {});

}  // namespace fracperc
