#pragma once

#include <string>

#include "fracperc/params.hpp"

namespace fracperc {

struct MomentReport {
    double mean = 0.0;
    double variance = 0.0;
};

// Similarity dimension D = log(M^d p) / log M.
double fractal_dimension(const ModelParams& P);

// Moments of the survivor count N_n (branching process with Binomial(M^d, p)
// offspring), with the linear-variance branch at M^d p = 1.
MomentReport gw_moments(const ModelParams& P, int n);

// Moments of the martingale limit W. Requires p > M^(-d).
MomentReport w_infinity_moments(const ModelParams& P);

// Moments of the volume of the level-n set.
MomentReport volume_moments(const ModelParams& P, int n);

// The volume variance written as p^(2n)(1-p) sum_{i=0}^{n-1} (M^d p)^(i-n),
// a single expression continuous across M^d p = 1.
double volume_variance_sum_form(const ModelParams& P, int n);

// Volume moments of the intersection of ell independent copies, equal in law
// to a single construction with retention p^ell.
MomentReport intersection_volume_moments(const ModelParams& P, int ell, int n);

// Expected boundary functional E V_{d-1}(F_n), iterated from
// E X_0 = d, E X_n = M p E X_{n-1} - d (M-1) p^(2n).
double surface_mean(const ModelParams& P, int n);

// Closed form c1 (Mp)^n (1 + (M-1)/(1-p) (p/M)^(n+1)); falls back to the
// recursion value at p = 1 where the closed form degenerates.
double surface_mean_closed_form(const ModelParams& P, int n);

/// Full state of the joint boundary-variance iteration at level n. All
/// component sequences are iterated numerically from their base cases, so the
/// removable singularities of the case-split closed forms never arise.
struct SurfaceRecursionState {
    int n = 0;
    double E_X = 0.0;        // E V_{d-1}(F_n)
    double Var_X = 0.0;      // Var V_{d-1}(F_n)
    double gamma = 0.0;      // facet-pair covariance sequence at n
    double corner_cov = 0.0; // corner-neighbor covariance chain at n
    double inter_mean = 0.0; // mean facet-intersection volume at n
    double inter_var = 0.0;  // variance of the facet-intersection volume at n
};

// Exact Var V_{d-1}(F_n) by joint iteration. Requires d >= 2.
SurfaceRecursionState surface_variance_exact(const ModelParams& P, int n);

struct SurfaceConstants {
    double c1 = 0.0;  // d M (1-p) / (M-p), the limit mean of the rescaled boundary functional
    double c2 = 0.0;  // c1^2 (1-p) / (M^d p - 1), its limit variance
};
SurfaceConstants surface_constants(const ModelParams& P);

// Position of p^2 relative to M^(1-d), which selects the second-order term of
// the boundary-variance growth.
enum class SurfaceRegime { above, boundary, below };

struct SurfaceAsymptotic {
    double leading = 0.0;  // c2 (Mp)^(2n)
    SurfaceRegime regime = SurfaceRegime::above;
    std::string remainder_order;
};

// Leading-order variance with regime classification. Requires p > M^(-d).
SurfaceAsymptotic surface_variance_asymptotic(const ModelParams& P, int n);

/// Predicted distance from the level-n rescaled functional to its limit, for
/// the top dimension (k = d) and the boundary case (k = d-1).
struct RateGap {
    double mean_gap = 0.0;
    double variance_gap = 0.0;
    std::string variance_order;
};

// Requires p > M^(-d) and k in {d-1, d}.
RateGap convergence_rate_predictions(const ModelParams& P, int n, int k);

}  // namespace fracperc
