#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fracperc/params.hpp"

namespace fracperc {

/// Occupancy of the level-n subdivision lattice: M^n cells per axis, row-major
/// cell codes (axis 0 fastest). Dense storage is a packed bitset; sparse
/// storage is a sorted code list, chosen automatically for thin levels.
struct CellGrid {
    int d = 0;
    int M = 0;
    int level = 0;
    std::int64_t side_count = 0;  // M^level
    double cell_side = 1.0;       // M^(-level)
    bool dense = true;
    std::vector<std::uint64_t> bits;   // dense: ceil(total/64) words
    std::vector<std::int64_t> codes;   // sparse: sorted occupied codes
    std::int64_t count = 0;
    std::int64_t budget_limit = std::numeric_limits<std::int64_t>::max();

    std::int64_t total_cells() const {
        std::int64_t t = 1;
        for (int a = 0; a < d; ++a) t *= side_count;
        return t;
    }

    bool occupied(std::int64_t code) const {
        if (dense) return (bits[std::uint64_t(code) >> 6] >> (code & 63)) & 1u;
        auto it = std::lower_bound(codes.begin(), codes.end(), code);
        return it != codes.end() && *it == code;
    }

    void set(std::int64_t code) {
        if (dense) {
            std::uint64_t& w = bits[std::uint64_t(code) >> 6];
            std::uint64_t m = 1ull << (code & 63);
            if (!(w & m)) { w |= m; ++count; }
        } else {
            if (std::int64_t(codes.size()) >= budget_limit)
                throw CapacityError("occupied cells exceed the cell budget");
            codes.push_back(code);  // caller sorts via finish()
            ++count;
        }
    }

    void finish() {
        if (!dense) {
            std::sort(codes.begin(), codes.end());
            codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
            count = std::int64_t(codes.size());
        }
    }

    template <typename F>
    void for_each_cell(F&& f) const {
        if (dense) {
            std::int64_t total = total_cells();
            for (std::int64_t w = 0; w < std::int64_t(bits.size()); ++w) {
                std::uint64_t word = bits[std::uint64_t(w)];
                while (word) {
                    int b = std::countr_zero(word);
                    std::int64_t code = (w << 6) | b;
                    if (code < total) f(code);
                    word &= word - 1;
                }
            }
        } else {
            for (std::int64_t c : codes) f(c);
        }
    }

    std::array<std::int64_t, 3> decode(std::int64_t code) const {
        std::array<std::int64_t, 3> x{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            x[std::size_t(a)] = code % side_count;
            code /= side_count;
        }
        return x;
    }

    std::int64_t encode(const std::array<std::int64_t, 3>& x) const {
        std::int64_t code = 0;
        for (int a = d - 1; a >= 0; --a) code = code * side_count + x[std::size_t(a)];
        return code;
    }

    static CellGrid make(int d, int M, int level, std::int64_t expected_cells,
                         std::int64_t cell_budget) {
        CellGrid g;
        g.d = d;
        g.M = M;
        g.level = level;
        g.side_count = ipow64(M, level);
        g.cell_side = std::pow(double(M), -level);
        std::int64_t total = 1;
        for (int a = 0; a < d; ++a) {
            if (total > std::numeric_limits<std::int64_t>::max() / g.side_count)
                throw CapacityError("lattice code space exceeds 63 bits");
            total *= g.side_count;
        }
        // the budget caps materialized memory in 8-byte units: bitset words
        // when dense, occupied codes when sparse
        std::int64_t words = (total + 63) >> 6;
        g.dense = expected_cells >= words;
        if (g.dense) {
            if (words > cell_budget)
                throw CapacityError("dense level " + std::to_string(level) + " needs " +
                                    std::to_string(words) + " words, budget " +
                                    std::to_string(cell_budget));
            g.bits.assign(std::size_t(words), 0ull);
        } else {
            if (expected_cells > cell_budget)
                throw CapacityError("expected " + std::to_string(expected_cells) +
                                    " cells at level " + std::to_string(level) + ", budget " +
                                    std::to_string(cell_budget));
            g.budget_limit = cell_budget;
            std::int64_t hint = std::clamp<std::int64_t>(expected_cells, 16, std::int64_t(1) << 22);
            g.codes.reserve(std::size_t(hint));
        }
        return g;
    }
};

/// A realization of the construction: nested grids F_0 .. F_{n_max} and the
/// per-level survivor counts N_n.
struct Realization {
    ModelParams params;
    std::vector<CellGrid> grids;
    std::vector<std::int64_t> counts;

    std::int64_t occupied_count(int n) const {
        if (n < 0 || n > params.n_max) throw ConfigError("level out of range");
        return counts[std::size_t(n)];
    }
};

}  // namespace fracperc
