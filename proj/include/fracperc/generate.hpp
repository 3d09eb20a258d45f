#pragma once

#include <iosfwd>
#include <string>

#include "fracperc/grid.hpp"

namespace fracperc {

// Generates F_0 .. F_{n_max}. Deterministic in (params.seed, params); children
// of distinct cells use independent key streams. Generation stops filling at
// the first empty level, deeper levels stay empty.
Realization generate(const ModelParams& params);

// Level-n cells whose level-1 ancestor is subcube j (1-based, row-major),
// positioned in the global lattice. Requires 1 <= n <= n_max.
CellGrid subpopulation(const Realization& r, int j, int n);

// A realization distributed as the cellwise intersection of ell independent
// copies: a single percolation with retention p^ell.
Realization generate_intersection(const ModelParams& params, int ell);

// Literal cellwise intersection of two realizations on the same lattice.
CellGrid intersect_grids(const CellGrid& a, const CellGrid& b);

// Key of the subtree rooted at the level-1 subcube j (1-based), for
// regenerating that subtree in isolation.
std::uint64_t subtree_key(const ModelParams& params, int j);

// Regenerates the level-n occupancy below subcube j from its subtree key only.
CellGrid regenerate_subtree(const ModelParams& params, int j, int n);

// Text dump: header "FRACPERC v1 d M p n seed", then one line per level with
// the run-length encoded bitset (alternating zero/one run lengths, zeros first).
void dump_grids(const Realization& r, std::ostream& os);

}  // namespace fracperc
