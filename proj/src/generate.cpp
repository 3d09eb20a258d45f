#include "fracperc/generate.hpp"

#include <cstdio>
#include <ostream>

#include "fracperc/rng.hpp"

namespace fracperc {

namespace {

// Key of the cell with the given coordinates at the given level, obtained by
// walking the subdivision path from the root.
std::uint64_t cell_key(const ModelParams& P, const std::array<std::int64_t, 3>& x, int level) {
    std::uint64_t key = rng::root_key(P.seed);
    for (int lev = 1; lev <= level; ++lev) {
        std::int64_t scale = ipow64(P.M, level - lev);
        std::uint64_t idx = 0;
        for (int a = P.d - 1; a >= 0; --a) {
            std::int64_t digit = (x[std::size_t(a)] / scale) % P.M;
            idx = idx * std::uint64_t(P.M) + std::uint64_t(digit);
        }
        key = rng::child_key(key, idx);
    }
    return key;
}

void fill_children(const ModelParams& P, const CellGrid& parent, std::uint64_t parent_root_key,
                   int parent_key_depth, CellGrid& child) {
    const std::int64_t S = parent.side_count;
    parent.for_each_cell([&](std::int64_t code) {
        std::array<std::int64_t, 3> px = parent.decode(code);
        std::uint64_t pkey;
        if (parent_key_depth == parent.level) {
            pkey = cell_key(P, px, parent.level);
        } else {
            // path below a fixed subtree root: walk only the deeper digits
            pkey = parent_root_key;
            for (int lev = parent_key_depth + 1; lev <= parent.level; ++lev) {
                std::int64_t scale = ipow64(P.M, parent.level - lev);
                std::uint64_t idx = 0;
                for (int a = P.d - 1; a >= 0; --a)
                    idx = idx * std::uint64_t(P.M) + std::uint64_t((px[std::size_t(a)] / scale) % P.M);
                pkey = rng::child_key(pkey, idx);
            }
        }
        std::int64_t nchild = 1;
        for (int a = 0; a < P.d; ++a) nchild *= P.M;
        for (std::int64_t ci = 0; ci < nchild; ++ci) {
            if (!rng::bernoulli(rng::child_key(pkey, std::uint64_t(ci)), P.p)) continue;
            std::array<std::int64_t, 3> cx{0, 0, 0};
            std::int64_t rem = ci;
            for (int a = 0; a < P.d; ++a) {
                cx[std::size_t(a)] = px[std::size_t(a)] * P.M + rem % P.M;
                rem /= P.M;
            }
            std::int64_t ccode = 0;
            for (int a = P.d - 1; a >= 0; --a) ccode = ccode * (S * P.M) + cx[std::size_t(a)];
            child.set(ccode);
        }
    });
    child.finish();
}

}  // namespace

Realization generate(const ModelParams& params) {
    params.validate();
    Realization r;
    r.params = params;
    CellGrid root = CellGrid::make(params.d, params.M, 0, 1, params.cell_budget);
    if (root.dense) root.set(0); else { root.set(0); root.finish(); }
    r.grids.push_back(std::move(root));
    r.counts.push_back(1);
    for (int n = 1; n <= params.n_max; ++n) {
        const CellGrid& prev = r.grids.back();
        std::int64_t expected = prev.count * params.branching();
        CellGrid g = CellGrid::make(params.d, params.M, n, expected, params.cell_budget);
        if (prev.count > 0) fill_children(params, prev, 0, prev.level, g);
        r.counts.push_back(g.count);
        r.grids.push_back(std::move(g));
    }
    return r;
}

CellGrid subpopulation(const Realization& r, int j, int n) {
    const ModelParams& P = r.params;
    if (j < 1 || j > P.branching()) throw ConfigError("subcube index out of range");
    if (n < 1 || n > P.n_max) throw ConfigError("level out of range");
    const CellGrid& g = r.grids[std::size_t(n)];
    CellGrid out = CellGrid::make(P.d, P.M, n, 0, P.cell_budget);
    std::int64_t block = ipow64(P.M, n - 1);
    g.for_each_cell([&](std::int64_t code) {
        std::array<std::int64_t, 3> x = g.decode(code);
        std::int64_t idx = 0;
        for (int a = P.d - 1; a >= 0; --a) idx = idx * P.M + x[std::size_t(a)] / block;
        if (idx == j - 1) out.set(code);
    });
    out.finish();
    return out;
}

Realization generate_intersection(const ModelParams& params, int ell) {
    if (ell < 1) throw ConfigError("intersection order must be >= 1");
    ModelParams q = params;
    q.p = std::pow(params.p, ell);
    return generate(q);
}

CellGrid intersect_grids(const CellGrid& a, const CellGrid& b) {
    if (a.d != b.d || a.level != b.level || a.M != b.M)
        throw ConfigError("grids not on the same lattice");
    CellGrid out = a;
    if (a.dense && b.dense) {
        for (std::size_t w = 0; w < out.bits.size(); ++w) out.bits[w] &= b.bits[w];
        out.count = 0;
        for (std::uint64_t w : out.bits) out.count += std::popcount(w);
    } else {
        std::vector<std::int64_t> both;
        a.for_each_cell([&](std::int64_t c) { if (b.occupied(c)) both.push_back(c); });
        out.dense = false;
        out.bits.clear();
        out.codes = std::move(both);
        out.count = std::int64_t(out.codes.size());
    }
    return out;
}

std::uint64_t subtree_key(const ModelParams& params, int j) {
    if (j < 1 || j > params.branching()) throw ConfigError("subcube index out of range");
    return rng::child_key(rng::root_key(params.seed), std::uint64_t(j - 1));
}

CellGrid regenerate_subtree(const ModelParams& params, int j, int n) {
    if (n < 1 || n > params.n_max) throw ConfigError("level out of range");
    std::uint64_t key = subtree_key(params, j);
    // level-1 cell of subcube j, retained iff its own mark fires
    CellGrid cur = CellGrid::make(params.d, params.M, 1, 0, params.cell_budget);
    if (rng::bernoulli(key, params.p)) {
        std::array<std::int64_t, 3> x{0, 0, 0};
        std::int64_t rem = j - 1;
        for (int a = 0; a < params.d; ++a) { x[std::size_t(a)] = rem % params.M; rem /= params.M; }
        cur.set(cur.encode(x));
    }
    cur.finish();
    for (int lev = 2; lev <= n; ++lev) {
        CellGrid next = CellGrid::make(params.d, params.M, lev, cur.count * params.branching(),
                                       params.cell_budget);
        if (cur.count > 0) fill_children(params, cur, key, 1, next);
        cur = std::move(next);
    }
    return cur;
}

void dump_grids(const Realization& r, std::ostream& os) {
    const ModelParams& P = r.params;
    char pbuf[32];
    std::snprintf(pbuf, sizeof pbuf, "%.17g", P.p);
    os << "FRACPERC v1 " << P.d << ' ' << P.M << ' ' << pbuf << ' ' << P.n_max << ' ' << P.seed
       << '\n';
    for (const CellGrid& g : r.grids) {
        std::int64_t total = g.total_cells();
        std::int64_t run = 0;
        bool bit = false;  // runs alternate starting with zeros
        bool first = true;
        for (std::int64_t c = 0; c <= total; ++c) {
            bool cur = c < total ? g.occupied(c) : !bit;
            if (cur == bit) { ++run; continue; }
            if (!first) os << ' ';
            os << run;
            first = false;
            bit = cur;
            run = 1;
        }
        os << '\n';
    }
}

}  // namespace fracperc
