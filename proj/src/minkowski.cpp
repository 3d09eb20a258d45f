#include "fracperc/minkowski.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace fracperc {

std::int64_t min_occupied_incident(const CellGrid& g, const std::array<std::int64_t, 3>& pos,
                                   unsigned span_mask) {
    const std::int64_t S = g.side_count;
    int flat[3];
    int nflat = 0;
    for (int a = 0; a < g.d; ++a)
        if (!(span_mask >> a & 1u)) flat[nflat++] = a;
    std::int64_t best = -1;
    for (unsigned sub = 0; sub < (1u << nflat); ++sub) {
        std::array<std::int64_t, 3> c = pos;
        bool ok = true;
        for (int i = 0; i < nflat; ++i) {
            c[std::size_t(flat[i])] += (sub >> i & 1u) ? -1 : 0;
            if (c[std::size_t(flat[i])] < 0 || c[std::size_t(flat[i])] >= S) ok = false;
        }
        if (!ok) continue;
        std::int64_t code = 0;
        for (int a = g.d - 1; a >= 0; --a) code = code * S + c[std::size_t(a)];
        if (g.occupied(code) && (best < 0 || code < best)) best = code;
    }
    return best;
}

FaceCensus face_census(const CellGrid& g) {
    FaceCensus out;
    const int d = g.d;
    const int nstates = [](int dd) { int r = 1; for (int i = 0; i < dd; ++i) r *= 3; return r; }(d);
    g.for_each_cell([&](std::int64_t code) {
        std::array<std::int64_t, 3> x = g.decode(code);
        // per-axis state 0 = span, 1 = low vertex, 2 = high vertex
        for (int st = 0; st < nstates; ++st) {
            std::array<std::int64_t, 3> pos = x;
            unsigned span_mask = 0;
            int rem = st, j = 0;
            for (int a = 0; a < d; ++a) {
                int s = rem % 3;
                rem /= 3;
                if (s == 0) { span_mask |= 1u << a; ++j; }
                else if (s == 2) pos[std::size_t(a)] += 1;
            }
            // count the face only from its smallest occupied incident cell
            if (min_occupied_incident(g, pos, span_mask) == code) ++out.f[std::size_t(j)];
        }
    });
    return out;
}

double volume(const CellGrid& g) {
    double sd = 1.0;
    for (int a = 0; a < g.d; ++a) sd *= g.cell_side;
    return double(g.count) * sd;
}

namespace {

std::int64_t boundary_facets(const CellGrid& g) {
    const std::int64_t S = g.side_count;
    std::int64_t facets = 0;
    g.for_each_cell([&](std::int64_t code) {
        std::array<std::int64_t, 3> x = g.decode(code);
        std::int64_t stride = 1;
        for (int a = 0; a < g.d; ++a) {
            for (int dir = -1; dir <= 1; dir += 2) {
                std::int64_t nx = x[std::size_t(a)] + dir;
                if (nx < 0 || nx >= S || !g.occupied(code + dir * stride)) ++facets;
            }
            stride *= S;
        }
    });
    return facets;
}

}  // namespace

double surface(const CellGrid& g) {
    double sk = 1.0;
    for (int a = 0; a < g.d - 1; ++a) sk *= g.cell_side;
    return 0.5 * double(boundary_facets(g)) * sk;
}

double euler(const CellGrid& g) {
    FaceCensus c = face_census(g);
    double chi = 0.0;
    for (int j = 0; j <= g.d; ++j) chi += (j % 2 ? -1.0 : 1.0) * double(c.f[std::size_t(j)]);
    return chi;
}

double edge_weight(unsigned mask) {
    static const double table[16] = {
        0.0,            // 0000
        0.25, 0.25,     // singles
        0.0,            // 0011 adjacent
        0.25,           // single
        0.0,            // 0101 adjacent
        -0.5,           // 0110 diagonal
        -0.25,          // triple
        0.25,           // single
        -0.5,           // 1001 diagonal
        0.0,            // 1010 adjacent
        -0.25,          // triple
        0.0,            // 1100 adjacent
        -0.25, -0.25,   // triples
        0.0,            // full
    };
    return table[mask & 15u];
}

double mean_width_3d(const CellGrid& g) {
    if (g.d != 3) throw ConfigError("mean width needs dimension 3");
    const std::int64_t S = g.side_count;
    // quarters of the total weight, exact in integers
    std::int64_t wq = 0;
    g.for_each_cell([&](std::int64_t code) {
        std::array<std::int64_t, 3> x = g.decode(code);
        for (int axis = 0; axis < 3; ++axis) {
            int b = (axis + 1) % 3, c = (axis + 2) % 3;
            for (int hb = 0; hb <= 1; ++hb)
                for (int hc = 0; hc <= 1; ++hc) {
                    std::array<std::int64_t, 3> pos = x;
                    pos[std::size_t(b)] += hb;
                    pos[std::size_t(c)] += hc;
                    // incident quadrant cells of the edge along axis at pos
                    unsigned mask = 0;
                    std::int64_t best = -1;
                    for (int db = -1; db <= 0; ++db)
                        for (int dc = -1; dc <= 0; ++dc) {
                            std::array<std::int64_t, 3> cc = pos;
                            cc[std::size_t(b)] += db;
                            cc[std::size_t(c)] += dc;
                            cc[std::size_t(axis)] = x[std::size_t(axis)];
                            if (cc[std::size_t(b)] < 0 || cc[std::size_t(b)] >= S ||
                                cc[std::size_t(c)] < 0 || cc[std::size_t(c)] >= S)
                                continue;
                            std::int64_t code2 = cc[2] * S * S + cc[1] * S + cc[0];
                            if (g.occupied(code2)) {
                                mask |= 1u << ((db + 1) + 2 * (dc + 1));
                                if (best < 0 || code2 < best) best = code2;
                            }
                        }
                    if (best == code) wq += std::llround(4.0 * edge_weight(mask));
                }
        }
    });
    return double(wq) * 0.25 * g.cell_side;
}

MinkowskiVector intrinsic_selected(const CellGrid& g, unsigned k_mask) {
    MinkowskiVector v;
    v.d = g.d;
    v.side = g.cell_side;
    if (g.d > 3) throw ConfigError("full vector supported for dimension <= 3");
    if (k_mask & 1u) {
        FaceCensus c = face_census(g);
        std::int64_t chi4 = 0;
        for (int j = 0; j <= g.d; ++j) chi4 += (j % 2 ? -4 : 4) * c.f[std::size_t(j)];
        v.quarters[0] = chi4;
    }
    if (k_mask & (1u << g.d)) v.quarters[std::size_t(g.d)] = 4 * g.count;
    if (g.d >= 2 && (k_mask & (1u << (g.d - 1))))
        v.quarters[std::size_t(g.d - 1)] = 2 * boundary_facets(g);
    if (g.d == 3 && (k_mask & 2u)) {
        double w = mean_width_3d(g);
        v.quarters[1] = std::llround(4.0 * w / g.cell_side);
    }
    for (int k = 0; k <= g.d; ++k) {
        if (!(k_mask & (1u << k))) continue;
        double sk = 1.0;
        for (int i = 0; i < k; ++i) sk *= g.cell_side;
        v.values[std::size_t(k)] = 0.25 * double(v.quarters[std::size_t(k)]) * sk;
    }
    return v;
}

MinkowskiVector intrinsic_all(const CellGrid& g) {
    unsigned all = (1u << (g.d + 1)) - 1u;
    return intrinsic_selected(g, all);
}

MinkowskiVector brute_force_intrinsic(const std::vector<std::array<std::int64_t, 3>>& cells, int d,
                                      double side) {
    if (cells.size() > 20) throw ConfigError("brute force limited to 20 cells");
    MinkowskiVector v;
    v.d = d;
    v.side = side;
    const int n = int(cells.size());
    static const std::int64_t binom[4][4] = {
        {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (std::uint32_t sub = 1; sub < (1u << n); ++sub) {
        std::int64_t lo[3], hi[3];
        for (int a = 0; a < d; ++a) { lo[a] = INT64_MIN; hi[a] = INT64_MAX; }
        for (int i = 0; i < n; ++i) {
            if (!(sub >> i & 1u)) continue;
            for (int a = 0; a < d; ++a) {
                lo[a] = std::max(lo[a], cells[std::size_t(i)][std::size_t(a)]);
                hi[a] = std::min(hi[a], cells[std::size_t(i)][std::size_t(a)] + 1);
            }
        }
        bool empty = false;
        int unit_axes = 0;
        for (int a = 0; a < d; ++a) {
            std::int64_t len = hi[a] - lo[a];
            if (len < 0) { empty = true; break; }
            if (len == 1) ++unit_axes;
        }
        if (empty) continue;
        std::int64_t sign = std::popcount(sub) % 2 ? 1 : -1;
        for (int k = 0; k <= d; ++k) v.quarters[std::size_t(k)] += sign * 4 * binom[unit_axes][k];
    }
    for (int k = 0; k <= d; ++k) {
        double sk = 1.0;
        for (int i = 0; i < k; ++i) sk *= side;
        v.values[std::size_t(k)] = 0.25 * double(v.quarters[std::size_t(k)]) * sk;
    }
    return v;
}

}  // namespace fracperc
