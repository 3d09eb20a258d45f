#include "fracperc/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "fracperc/experiments.hpp"
#include "fracperc/generate.hpp"
#include "fracperc/minkowski.hpp"
#include "fracperc/rng.hpp"
#include "fracperc/series.hpp"
#include "fracperc/stats.hpp"
#include "fracperc/theory.hpp"

namespace fracperc::acceptance {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::int64_t capped(const Options& opt, std::int64_t pinned) {
    if (opt.reps_cap > 0 && opt.reps_cap < pinned) return opt.reps_cap;
    return pinned;
}

// Exhaustive distribution of V_1(F_1) for d = 2, M = 2: all 16 retention
// patterns of the four level-1 cells.
void level1_surface_distribution(double p, double& mean, double& var) {
    double e1 = 0.0, e2 = 0.0;
    for (unsigned mask = 0; mask < 16; ++mask) {
        CellGrid g = CellGrid::make(2, 2, 1, 4, 1 << 20);
        int bits = 0;
        for (int c = 0; c < 4; ++c)
            if (mask & (1u << c)) {
                g.set(c);
                ++bits;
            }
        g.finish();
        double w = surface(g);
        double pr = std::pow(p, bits) * std::pow(1.0 - p, 4 - bits);
        e1 += pr * w;
        e2 += pr * w * w;
    }
    mean = e1;
    var = e2 - e1 * e1;
}

CriterionResult volume_identity(const Options&) {
    CriterionResult r{1, "exact volume identity", true, ""};
    struct Combo {
        int d, M;
        double p;
    };
    const Combo combos[] = {{1, 2, 0.6}, {1, 3, 0.6}, {2, 2, 0.7},
                            {2, 3, 0.5}, {3, 2, 0.4}, {3, 3, 0.2}};
    int checked = 0;
    for (int i = 0; i < 100 && r.pass; ++i) {
        const Combo& c = combos[i % 6];
        ModelParams P;
        P.d = c.d;
        P.M = c.M;
        P.p = c.p;
        P.n_max = 8;
        P.seed = 1000 + std::uint64_t(i);
        Realization real = generate(P);
        for (int n = 0; n <= P.n_max; ++n) {
            const CellGrid& g = real.grids[std::size_t(n)];
            double sd = 1.0;
            for (int a = 0; a < P.d; ++a) sd *= g.cell_side;
            double ref = double(real.occupied_count(n)) * sd;
            if (volume(g) != ref) {
                r.pass = false;
                r.detail = "mismatch at d=" + std::to_string(c.d) + " M=" + std::to_string(c.M) +
                           " n=" + std::to_string(n) + " seed=" + std::to_string(P.seed);
                break;
            }
            ++checked;
        }
    }
    if (r.pass) r.detail = std::to_string(checked) + " level checks, all exact";
    return r;
}

CriterionResult minkowski_oracle(const Options&) {
    CriterionResult r{2, "intrinsic volumes match the inclusion-exclusion oracle", true, ""};
    double worst = 0.0;
    for (int i = 0; i < 1000 && r.pass; ++i) {
        int d = (i % 2) ? 3 : 2;
        std::uint64_t key = rng::replication_seed(4242, std::uint64_t(i));
        key = rng::mix(key);
        int ncells = 1 + int(key % 12);
        CellGrid g = CellGrid::make(d, 4, 1, 16, 1 << 20);
        for (int j = 0; j < ncells; ++j) {
            std::array<std::int64_t, 3> x{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                key = rng::mix(key + 0x9e3779b97f4a7c15ull);
                x[std::size_t(a)] = std::int64_t(key % 4);
            }
            g.set(g.encode(x));
        }
        g.finish();
        std::vector<std::array<std::int64_t, 3>> cells;
        g.for_each_cell([&](std::int64_t code) { cells.push_back(g.decode(code)); });
        MinkowskiVector got = intrinsic_all(g);
        MinkowskiVector want = brute_force_intrinsic(cells, d, g.cell_side);
        for (int k = 0; k <= d; ++k) {
            if (got.quarters[std::size_t(k)] != want.quarters[std::size_t(k)]) {
                r.pass = false;
                r.detail = "quarter mismatch, set " + std::to_string(i) + " k=" + std::to_string(k);
                break;
            }
            worst = std::max(worst, std::abs(got.values[std::size_t(k)] -
                                             want.values[std::size_t(k)]));
        }
    }
    if (worst > 1e-12) {
        r.pass = false;
        r.detail = "float deviation " + fmt(worst);
    }
    if (r.pass) r.detail = "1000 random sets exact, max float deviation " + fmt(worst);
    return r;
}

CriterionResult volume_moments_mc(const Options& opt) {
    CriterionResult r{3, "volume mean and variance against closed forms", true, ""};
    ModelParams P;
    P.d = 2;
    P.M = 3;
    P.p = 0.6;
    P.n_max = 5;
    P.seed = 71003;
    ReplicationPlan plan;
    plan.params = P;
    plan.reps = capped(opt, 100000);
    plan.k_mask = 1u << 2;
    RunResult res = run(plan);
    const StreamingMoments& acc = res.levels[5];
    MomentReport want = volume_moments(P, 5);
    double zm = (acc.mean(2) - want.mean) / acc.mean_se(2);
    double zv = (acc.variance(2) - want.variance) / acc.variance_se(2);
    r.pass = std::abs(zm) <= 4.0 && std::abs(zv) <= 4.0;
    r.detail = "mean z=" + fmt(zm) + ", variance z=" + fmt(zv) + " (target mean " +
               fmt(want.mean) + ")";
    return r;
}

CriterionResult surface_mean_check(const Options& opt) {
    CriterionResult r{4, "surface mean by exhaustive enumeration and Monte Carlo", true, ""};
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.7;
    P.n_max = 6;
    P.seed = 71004;
    double mean1 = 0.0, var1 = 0.0;
    level1_surface_distribution(P.p, mean1, var1);
    if (std::abs(mean1 - 1.82) > 1e-12) {
        r.pass = false;
        r.detail = "level-1 enumeration gave " + fmt(mean1);
        return r;
    }
    ReplicationPlan plan;
    plan.params = P;
    plan.reps = capped(opt, 100000);
    plan.k_mask = 1u << 1;
    RunResult res = run(plan);
    double target = surface_mean_closed_form(P, 6);
    double z = (res.levels[6].mean(1) - target) / res.levels[6].mean_se(1);
    r.pass = std::abs(z) <= 4.0;
    r.detail = "enumeration exact, n=6 mean z=" + fmt(z);
    return r;
}

CriterionResult surface_variance_check(const Options& opt) {
    CriterionResult r{5, "surface variance recursion against enumeration and simulation",
                      true, ""};
    for (double p : {0.5, 0.7, 0.9}) {
        ModelParams P;
        P.d = 2;
        P.M = 2;
        P.p = p;
        P.n_max = 1;
        double mean1 = 0.0, var1 = 0.0;
        level1_surface_distribution(p, mean1, var1);
        double got = surface_variance_exact(P, 1).Var_X;
        if (std::abs(got - var1) > 1e-12) {
            r.pass = false;
            r.detail = "n=1 recursion " + fmt(got) + " vs enumeration " + fmt(var1) +
                       " at p=" + fmt(p);
            return r;
        }
    }
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.8;
    P.n_max = 5;
    P.seed = 71005;
    ReplicationPlan plan;
    plan.params = P;
    plan.reps = capped(opt, 100000);
    plan.k_mask = 1u << 1;
    RunResult res = run(plan);
    double worst_z = 0.0;
    for (int n = 1; n <= 5; ++n) {
        double want = surface_variance_exact(P, n).Var_X;
        double z = (res.levels[std::size_t(n)].variance(1) - want) /
                   res.levels[std::size_t(n)].variance_se(1);
        worst_z = std::max(worst_z, std::abs(z));
    }
    if (worst_z > 4.0) {
        r.pass = false;
        r.detail = "variance z=" + fmt(worst_z) + " out of band";
        return r;
    }
    SurfaceConstants sc = surface_constants(P);
    double beta20 = surface_variance_exact(P, 20).Var_X;
    double ratio = beta20 / (sc.c2 * std::pow(double(P.M) * P.p, 40));
    if (std::abs(ratio - 1.0) >= 1e-3) {
        r.pass = false;
        r.detail = "asymptotic ratio " + fmt(ratio);
        return r;
    }
    r.detail = "enumeration exact, worst variance z=" + fmt(worst_z) + ", n=20 ratio " +
               fmt(ratio);
    return r;
}

CriterionResult w_moments_check(const Options& opt) {
    CriterionResult r{6, "normalized count mean 1 and limit variance", true, ""};
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.8;
    P.n_max = 10;
    P.seed = 71006;
    ReplicationPlan plan;
    plan.params = P;
    plan.reps = capped(opt, 10000);
    plan.k_mask = 1u << 2;
    RunResult res = run(plan);
    const StreamingMoments& acc = res.levels[10];
    int zi = 3 + 2;  // rescaled volume column
    double z = (acc.mean(zi) - 1.0) / acc.mean_se(zi);
    double vw = w_infinity_moments(P).variance;
    double rel = std::abs(acc.variance(zi) - vw) / vw;
    r.pass = std::abs(z) <= 4.0 && rel <= 0.10;
    r.detail = "mean z=" + fmt(z) + ", variance within " + fmt(100.0 * rel) + "% of 1/11";
    return r;
}

CriterionResult factorization_structure(const Options& opt) {
    CriterionResult r{7, "factorization and covariance structure", true, ""};
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.8;
    P.n_max = 8;
    P.seed = 71007;
    ReplicationPlan plan;
    plan.params = P;
    plan.reps = capped(opt, 10000);
    plan.k_mask = 0x7u;
    plan.record_trajectories = true;
    RunResult res = run(plan);
    double target = w_infinity_moments(P).variance;
    auto checks = cv_limit_check(res.trajectories, P, 0x7u, 1000, 0.99, 71107);
    std::ostringstream detail;
    for (const auto& c : checks) {
        bool covered = !c.degenerate && target >= c.ci.lo && target <= c.ci.hi;
        if (!covered) r.pass = false;
        detail << "cv2[" << c.k << "]=" << fmt(c.statistic) << " ci [" << fmt(c.ci.lo) << " "
               << fmt(c.ci.hi) << "] " << (covered ? "covers" : "misses") << " 1/11; ";
    }
    std::vector<double> corr = correlation_check(res.levels[8], P.d);
    double c12 = corr[1 * 3 + 2];
    if (!(c12 >= 0.99)) r.pass = false;
    detail << "corr=" << fmt(c12) << "; ";
    ResidualReport rr = factorization_check(res.trajectories, {0.0, 0.0, 1.0}, 2, 0.0, 0);
    if (rr.max_abs_final != 0.0) r.pass = false;
    detail << "volume residual " << fmt(rr.max_abs_final);
    r.detail = detail.str();
    return r;
}

CriterionResult convergence_rates(const Options& opt) {
    CriterionResult r{8, "geometric convergence rates of moment gaps", true, ""};
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.8;
    P.n_max = 6;
    P.seed = 71008;
    std::vector<int> levels;
    std::vector<double> var_gaps, mean_gaps;
    for (int n = 1; n <= 8; ++n) {
        levels.push_back(n);
        var_gaps.push_back(convergence_rate_predictions(P, n, 2).variance_gap);
        mean_gaps.push_back(convergence_rate_predictions(P, n, 1).mean_gap);
    }
    RateFit fv = rate_fit(levels, var_gaps);
    RateFit fm = rate_fit(levels, mean_gaps);
    double want_v = 1.0 / (double(P.branching()) * P.p);
    double want_m = P.p / double(P.M);
    if (!fv.ok || std::abs(fv.rate - want_v) > 1e-10 || !fm.ok ||
        std::abs(fm.rate - want_m) > 1e-10) {
        r.pass = false;
        r.detail = "theory gap rates " + fmt(fv.rate) + ", " + fmt(fm.rate);
        return r;
    }
    std::int64_t pinned = 1000000;
    ReplicationPlan plan;
    plan.params = P;
    plan.reps = capped(opt, pinned);
    plan.k_mask = 1u << 2;
    RunResult res = run(plan);
    double vw = w_infinity_moments(P).variance;
    std::vector<int> sim_levels;
    std::vector<double> gaps, ses;
    for (int n = 1; n <= 6; ++n) {
        sim_levels.push_back(n);
        gaps.push_back(vw - res.levels[std::size_t(n)].variance(5));
        ses.push_back(res.levels[std::size_t(n)].variance_se(5));
    }
    RateFit fs = rate_fit(sim_levels, gaps, ses);
    if (!fs.ok) {
        if (plan.reps < pinned) {
            r.detail = "theory rates exact; simulated fit skipped at reduced replication count (" +
                       fs.diagnostic + ")";
            return r;
        }
        r.pass = false;
        r.detail = "simulated fit unusable: " + fs.diagnostic;
        return r;
    }
    double rel = std::abs(fs.rate * (double(P.branching()) * P.p) - 1.0);
    r.pass = rel <= 0.15;
    r.detail = "theory rates exact; simulated rate " + fmt(fs.rate) + " (" +
               std::to_string(fs.levels_used) + " levels, rel err " + fmt(rel) + ")";
    return r;
}

CriterionResult limit_series_check(const Options&) {
    CriterionResult r{9, "limit functional series against the surface constant", true, ""};
    std::ostringstream detail;
    for (int M : {2, 3}) {
        for (double p : {0.7, 0.9}) {
            ModelParams P;
            P.d = 2;
            P.M = M;
            P.p = p;
            SeriesOptions so;
            so.tolerance = 1e-8;
            SeriesResult top = limit_functional_series(P, 2, so);
            if (top.value != 1.0) {
                r.pass = false;
                r.detail = "top functional " + fmt(top.value) + " at M=" + std::to_string(M) +
                           " p=" + fmt(p);
                return r;
            }
            SeriesResult s = limit_functional_series(P, 1, so);
            double c1 = surface_constants(P).c1;
            bool narrow = s.half_width <= 0.01 * c1;
            bool inside = std::abs(s.value - c1) <= s.half_width + 1e-13;
            if (!s.converged || !narrow || !inside) {
                r.pass = false;
                r.detail = "M=" + std::to_string(M) + " p=" + fmt(p) + ": value " + fmt(s.value) +
                           " vs " + fmt(c1) + ", half width " + fmt(s.half_width);
                return r;
            }
            detail << "M" << M << "p" << fmt(p) << " err=" << fmt(std::abs(s.value - c1)) << " ";
        }
    }
    r.detail = detail.str();
    return r;
}

CriterionResult intersection_law(const Options& opt) {
    CriterionResult r{10, "intersections behave as squared-retention percolation", true, ""};
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.7;
    P.n_max = 1;
    std::int64_t R = capped(opt, 100000);
    std::vector<std::int64_t> literal(5, 0), reference(5, 0);
    for (std::int64_t i = 0; i < R; ++i) {
        ModelParams A = P, B = P, C = P;
        A.seed = rng::replication_seed(9001, std::uint64_t(i));
        B.seed = rng::replication_seed(9002, std::uint64_t(i));
        C.seed = rng::replication_seed(9003, std::uint64_t(i));
        C.p = P.p * P.p;
        CellGrid inter = intersect_grids(generate(A).grids[1], generate(B).grids[1]);
        ++literal[std::size_t(inter.count)];
        ++reference[std::size_t(generate(C).occupied_count(1))];
    }
    GofResult gof = two_sample_chi_square(literal, reference);
    if (gof.p_value <= 0.01) {
        r.pass = false;
        r.detail = "count histograms differ, p value " + fmt(gof.p_value);
        return r;
    }
    ModelParams P2 = P;
    P2.n_max = 2;
    std::int64_t Rm = capped(opt, 20000);
    StreamingMoments acc(1);
    for (std::int64_t i = 0; i < Rm; ++i) {
        ModelParams A = P2, B = P2;
        A.seed = rng::replication_seed(9004, std::uint64_t(i));
        B.seed = rng::replication_seed(9005, std::uint64_t(i));
        CellGrid inter = intersect_grids(generate(A).grids[2], generate(B).grids[2]);
        double v = volume(inter);
        acc.push(&v);
    }
    MomentReport want = intersection_volume_moments(P2, 2, 2);
    double zm = (acc.mean(0) - want.mean) / acc.mean_se(0);
    double zv = (acc.variance(0) - want.variance) / acc.variance_se(0);
    if (std::abs(zm) > 4.0 || std::abs(zv) > 4.0) {
        r.pass = false;
        r.detail = "intersection volume z: mean " + fmt(zm) + ", variance " + fmt(zv);
        return r;
    }
    r.detail = "GOF p=" + fmt(gof.p_value) + ", volume z: mean " + fmt(zm) + ", variance " +
               fmt(zv);
    return r;
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& opt, std::ostream& os) {
    std::vector<CriterionResult> out;
    CriterionResult (*const items[])(const Options&) = {
        volume_identity,    minkowski_oracle, volume_moments_mc,       surface_mean_check,
        surface_variance_check, w_moments_check,  factorization_structure, convergence_rates,
        limit_series_check, intersection_law};
    for (auto* item : items) {
        CriterionResult r = item(opt);
        os << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.name
           << "  [" << r.detail << "]\n";
        os.flush();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace fracperc::acceptance
