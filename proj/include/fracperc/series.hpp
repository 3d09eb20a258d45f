#pragma once

#include <cstdint>
#include <vector>

#include "fracperc/params.hpp"

namespace fracperc {

struct SeriesOptions {
    double tolerance = 1e-4;          // relative truncation target
    int max_terms = 400;
    std::int64_t mc_reps = 0;         // per-term replications; 0 selects exact evaluation
    int mc_level_cap = 4;             // deepest refinement level simulated on the MC path
    std::int64_t mc_total_budget = 0; // total realizations allowed; 0 means unlimited
    std::uint64_t seed = 0;
};

struct SeriesResult {
    double value = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;   // estimated magnitude of the truncated tail
    double mc_se = 0.0;        // standard error contributed by sampled terms
    double half_width = 0.0;   // tail_bound plus 2.576 mc_se, the reported CI radius
    bool budget_exhausted = false;
    bool converged = false;
};

// The limit functional series: the k-th rescaled expectation of the limit set,
// q_{d,k} plus the inclusion-exclusion sum over first-level cube subsets.
// Terms are exact by default; with mc_reps > 0 the deepest-level expectations
// up to mc_level_cap are replaced by Monte Carlo estimates.
SeriesResult limit_functional_series(const ModelParams& P, int k, const SeriesOptions& opt = {});

// All limit functionals k = 0..d, exact path.
std::vector<double> limit_functionals(const ModelParams& P, const SeriesOptions& opt = {});

// cov[k][l] = vbar[k] * vbar[l] * (1-p)/(M^d p - 1). Requires p > M^(-d).
std::vector<std::vector<double>> limit_covariance(const ModelParams& P,
                                                  const std::vector<double>& vbar);

namespace series_detail {

// Number of t-subsets of the 2^w corners of a w-cube that use both halves in
// every coordinate.
std::int64_t spanning_subset_count(int w, int t);

// Number of t-subsets of the M^d first-level cubes whose common intersection
// is a u-dimensional face.
std::int64_t face_class_count(int d, int M, int u, int t);

// Exact E V_k of the t-fold intersection of independent u-dimensional
// constructions at level m, on the unit-cube scale. Supports u <= 2, k <= u.
double intersection_term(int u, int k, int M, double p, int m, int t);

// Monte Carlo estimate of the same expectation: mean and standard error.
struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
};
McEstimate intersection_term_mc(int u, int k, int M, double p, int m, int t, std::int64_t reps,
                                std::uint64_t seed);

}  // namespace series_detail

}  // namespace fracperc
