#include "fracperc/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracperc/generate.hpp"
#include "fracperc/minkowski.hpp"
#include "fracperc/rng.hpp"

namespace fracperc {

namespace series_detail {

namespace {

std::int64_t binom(int n, int r) {
    if (r < 0 || r > n) return 0;
    std::int64_t v = 1;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t v = 1;
    for (int i = 0; i < e; ++i) v *= b;
    return v;
}

// P(at least one of two adjacent cells is occupied) when their subdivision
// chains split at level l.
double touch2(double p, int m, int l) {
    return 2.0 * std::pow(p, m) - std::pow(p, 2 * m - l);
}

// Same for the 2x2 block of cells around an interior vertex, with chain
// splits at lx (first axis) and ly (second axis).
double touch4(double p, int m, int lx, int ly) {
    int c = std::min(lx, ly);
    int big = std::max(lx, ly);
    return 4.0 * std::pow(p, m) -
           (2.0 * std::pow(p, 2 * m - lx) + 2.0 * std::pow(p, 2 * m - ly) +
            2.0 * std::pow(p, 2 * m - c)) +
           4.0 * std::pow(p, 3 * m - lx - ly) - std::pow(p, 4 * m - 2 * big - c);
}

// u = 1: expected component count (Euler number) of the t-fold intersection.
double euler_1d(int M, double p, int m, int t) {
    if (m == 0) return 1.0;
    double edges = std::pow(M, m) * std::pow(p, double(t) * m);
    double verts = 2.0 * std::pow(p, double(t) * m);
    for (int l = 0; l < m; ++l)
        verts += (M - 1) * std::pow(M, l) * std::pow(touch2(p, m, l), t);
    return verts - edges;
}

// u = 2: expected contained-face counts; returns the Euler number and, via
// out_v1, the length functional on the unit-square scale.
double census_2d(int M, double p, int m, int t, double* out_v1) {
    if (m == 0) {
        if (out_v1) *out_v1 = 2.0;
        return 1.0;
    }
    const double S = std::pow(M, m);
    const double ptm = std::pow(p, double(t) * m);
    double g2 = S * S * ptm;
    double inner = 0.0;
    for (int l = 0; l < m; ++l)
        inner += (M - 1) * std::pow(M, l) * std::pow(touch2(p, m, l), t);
    double g1 = 2.0 * (S * inner + 2.0 * S * ptm);
    double interior = 0.0;
    for (int lx = 0; lx < m; ++lx)
        for (int ly = 0; ly < m; ++ly)
            interior += (M - 1) * std::pow(M, lx) * (M - 1) * std::pow(M, ly) *
                        std::pow(touch4(p, m, lx, ly), t);
    double g0 = 4.0 * ptm + 4.0 * inner + interior;
    if (out_v1) {
        // contained edges weighted 1 - c/2, c = contained incident cells;
        // summing c over edges gives 4 per contained cell
        *out_v1 = (g1 - 0.5 * 4.0 * S * S * ptm) / S;
    }
    return g0 - g1 + g2;
}

}  // namespace

std::int64_t spanning_subset_count(int w, int t) {
    std::int64_t total = 0;
    for (int s = 0; s <= w; ++s) {
        std::int64_t corners = ipow(2, w - s);
        total += (s % 2 ? -1 : 1) * binom(w, s) * ipow(2, s) * binom(int(corners), t);
    }
    return total;
}

std::int64_t face_class_count(int d, int M, int u, int t) {
    if (u < 0 || u >= d || t < 2) return 0;
    int w = d - u;
    return binom(d, u) * ipow(M, u) * ipow(M - 1, w) * spanning_subset_count(w, t);
}

double intersection_term(int u, int k, int M, double p, int m, int t) {
    if (k == u) return std::pow(p, double(t) * m);
    if (u == 1 && k == 0) return euler_1d(M, p, m, t);
    if (u == 2 && k == 0) return census_2d(M, p, m, t, nullptr);
    if (u == 2 && k == 1) {
        double v1 = 0.0;
        census_2d(M, p, m, t, &v1);
        return v1;
    }
    throw ConfigError("unsupported face dimension in series term");
}

namespace {

// V_k of the faces contained in every one of the given closed unions, all on
// the same lattice. k = 0 gives the Euler number, k = 1 (two-dimensional
// grids) the length functional.
double contained_complex_value(const std::vector<CellGrid>& gs, int k) {
    const CellGrid& g0 = gs.front();
    const int u = g0.d;
    const std::int64_t S = g0.side_count;
    int nstates = 1;
    for (int i = 0; i < u; ++i) nstates *= 3;
    double acc = 0.0;
    g0.for_each_cell([&](std::int64_t code) {
        std::array<std::int64_t, 3> x = g0.decode(code);
        for (int st = 0; st < nstates; ++st) {
            std::array<std::int64_t, 3> pos = x;
            unsigned span_mask = 0;
            int rem = st, j = 0;
            for (int a = 0; a < u; ++a) {
                int s = rem % 3;
                rem /= 3;
                if (s == 0) { span_mask |= 1u << a; ++j; }
                else if (s == 2) pos[std::size_t(a)] += 1;
            }
            if (min_occupied_incident(g0, pos, span_mask) != code) continue;
            bool in_all = true;
            for (std::size_t i = 1; i < gs.size() && in_all; ++i)
                in_all = min_occupied_incident(gs[i], pos, span_mask) >= 0;
            if (!in_all) continue;
            if (k == 0) {
                acc += (j % 2 ? -1.0 : 1.0);
            } else if (k == 1 && u == 2 && j == 1) {
                int flat = (span_mask & 1u) ? 1 : 0;
                int c = 0;
                for (int delta = -1; delta <= 0; ++delta) {
                    std::array<std::int64_t, 3> cc = pos;
                    cc[std::size_t(flat)] += delta;
                    if (cc[std::size_t(flat)] < 0 || cc[std::size_t(flat)] >= S) continue;
                    std::int64_t code2 = cc[1] * S + cc[0];
                    bool occ_all = true;
                    for (const CellGrid& g : gs)
                        if (!g.occupied(code2)) { occ_all = false; break; }
                    if (occ_all) ++c;
                }
                acc += 1.0 - 0.5 * double(c);
            }
        }
    });
    if (k == 1) acc *= g0.cell_side;
    return acc;
}

}  // namespace

McEstimate intersection_term_mc(int u, int k, int M, double p, int m, int t, std::int64_t reps,
                                std::uint64_t seed) {
    if (reps < 1) throw ConfigError("replication count must be >= 1");
    ModelParams Q;
    Q.d = u;
    Q.M = M;
    Q.p = p;
    Q.n_max = m;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t r = 0; r < reps; ++r) {
        std::vector<CellGrid> gs;
        gs.reserve(std::size_t(t));
        bool any_empty = false;
        for (int i = 0; i < t; ++i) {
            Q.seed = rng::replication_seed(seed, std::uint64_t(r) * std::uint64_t(t) + i);
            Realization real = generate(Q);
            if (real.grids.back().count == 0) any_empty = true;
            gs.push_back(std::move(real.grids.back()));
        }
        double v = any_empty ? 0.0 : contained_complex_value(gs, k);
        sum += v;
        sumsq += v * v;
    }
    McEstimate e;
    e.mean = sum / double(reps);
    double var = (sumsq - sum * sum / double(reps)) / std::max<double>(1.0, double(reps - 1));
    e.se = std::sqrt(std::max(0.0, var) / double(reps));
    return e;
}

}  // namespace series_detail

SeriesResult limit_functional_series(const ModelParams& P, int k, const SeriesOptions& opt) {
    P.validate();
    if (k < 0 || k > P.d) throw ConfigError("functional index out of range");
    if (P.d > 3) throw ConfigError("series supported for dimension <= 3");
    using namespace series_detail;

    SeriesResult res;
    res.value = double(binom(P.d, k));  // the level-0 cube contributes q_{d,k}
    if (k == P.d) {
        // distinct first-level cubes never share a d-dimensional face
        res.converged = true;
        return res;
    }

    struct ClassRef {
        int u;
        int t;
        std::int64_t count;
    };
    std::vector<ClassRef> classes;
    for (int u = k; u < P.d; ++u)
        for (int t = 2; t <= (1 << (P.d - u)); ++t) {
            std::int64_t c = face_class_count(P.d, P.M, u, t);
            if (c != 0) classes.push_back({u, t, c});
        }

    const double scale_base = std::pow(double(P.M), k - P.d) / P.p;  // M^(k-D)
    std::int64_t budget_left =
        opt.mc_total_budget > 0 ? opt.mc_total_budget : std::numeric_limits<std::int64_t>::max();
    double mc_var = 0.0;
    double prev_abs = 0.0;
    double ratio_hist[3] = {0.0, 0.0, 0.0};
    std::uint64_t stream = 0;

    for (int n = 1; n <= opt.max_terms; ++n) {
        const int m = n - 1;
        const double scale = std::pow(scale_base, n);
        double rn = 0.0;
        double rn_var = 0.0;
        bool sampled_any = false;
        for (const ClassRef& cr : classes) {
            double coeff = double(cr.count) * (cr.t % 2 ? 1.0 : -1.0) * std::pow(P.p, cr.t) *
                           std::pow(double(P.M), -k);
            // the top-dimension law p^(tm) is already closed form, never sampled
            bool sample = opt.mc_reps > 0 && m <= opt.mc_level_cap && m >= 1 && cr.u > k;
            if (sample) {
                std::int64_t cost = opt.mc_reps * cr.t;
                if (cost > budget_left) {
                    res.budget_exhausted = true;
                    res.tail_bound = prev_abs;  // at least the size of the next term
                    res.mc_se = std::sqrt(mc_var);
                    res.half_width = res.tail_bound + 2.576 * res.mc_se;
                    return res;
                }
                budget_left -= cost;
                McEstimate e = intersection_term_mc(cr.u, k, P.M, P.p, m, cr.t, opt.mc_reps,
                                                    rng::replication_seed(opt.seed, stream++));
                rn += coeff * e.mean;
                rn_var += coeff * coeff * e.se * e.se;
                sampled_any = true;
            } else {
                rn += coeff * intersection_term(cr.u, k, P.M, P.p, m, cr.t);
            }
        }
        double term = scale * rn;
        if (!std::isfinite(term)) break;
        res.value += term;
        res.terms_used = n;
        if (sampled_any) mc_var += scale * scale * rn_var;

        double abs_term = std::abs(term);
        std::rotate(ratio_hist, ratio_hist + 1, ratio_hist + 3);
        ratio_hist[2] = prev_abs > 0.0 ? abs_term / prev_abs : 0.0;
        prev_abs = abs_term;
        if (n >= 5) {
            double r = std::max({ratio_hist[0], ratio_hist[1], ratio_hist[2]});
            r = std::min(0.99, 1.2 * r);  // safety margin on the observed decay
            double tail = abs_term * r / (1.0 - r);
            if (tail <= opt.tolerance * std::max(1.0, std::abs(res.value))) {
                res.tail_bound = tail;
                res.converged = true;
                break;
            }
            res.tail_bound = tail;
        }
    }
    res.mc_se = std::sqrt(mc_var);
    res.half_width = res.tail_bound + 2.576 * res.mc_se;
    return res;
}

std::vector<double> limit_functionals(const ModelParams& P, const SeriesOptions& opt) {
    std::vector<double> out(std::size_t(P.d) + 1);
    SeriesOptions exact = opt;
    exact.mc_reps = 0;
    for (int k = 0; k <= P.d; ++k) out[std::size_t(k)] = limit_functional_series(P, k, exact).value;
    return out;
}

std::vector<std::vector<double>> limit_covariance(const ModelParams& P,
                                                  const std::vector<double>& vbar) {
    P.validate();
    if (!P.supercritical()) throw ConfigError("limit covariance requires M^d p > 1");
    if (vbar.size() != std::size_t(P.d) + 1)
        throw ConfigError("need one functional per dimension 0..d");
    const double w = (1.0 - P.p) / (double(P.branching()) * P.p - 1.0);
    std::vector<std::vector<double>> cov(vbar.size(), std::vector<double>(vbar.size(), 0.0));
    for (std::size_t i = 0; i < vbar.size(); ++i)
        for (std::size_t j = 0; j < vbar.size(); ++j) cov[i][j] = vbar[i] * vbar[j] * w;
    return cov;
}

}  // namespace fracperc
