#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fracperc/grid.hpp"

namespace fracperc {

/// Intrinsic volumes V_0..V_d of a union of closed lattice cubes, additive
/// (polyconvex) convention. values[k] carries units length^k. The exact
/// quarters vector holds 4*V_k in units of cell_side^k, which is always an
/// integer for cube unions on a lattice.
struct MinkowskiVector {
    int d = 0;
    double side = 1.0;
    std::array<double, 4> values{0.0, 0.0, 0.0, 0.0};
    std::array<std::int64_t, 4> quarters{0, 0, 0, 0};
};

/// Counts of lattice j-faces contained in the closed union. A j-face is
/// contained iff at least one of its up to 2^(d-j) incident cells is occupied.
struct FaceCensus {
    std::array<std::int64_t, 4> f{0, 0, 0, 0};
};

FaceCensus face_census(const CellGrid& grid);

// Smallest occupied cell code among the cells incident to the face whose
// vertex coordinates are pos on the flat axes (span_mask marks span axes),
// or -1 when none is occupied. Used to count each face exactly once.
std::int64_t min_occupied_incident(const CellGrid& grid, const std::array<std::int64_t, 3>& pos,
                                   unsigned span_mask);

// N * side^d
double volume(const CellGrid& grid);

// Half surface area: (1/2) side^(d-1) * #(facets with exactly one occupied
// incident cell). In d=1 this equals the Euler characteristic.
double surface(const CellGrid& grid);

// Euler characteristic via the alternating face-count sum.
double euler(const CellGrid& grid);

// V_1 in d=3, concentrated on lattice edges with local configuration weights.
double mean_width_3d(const CellGrid& grid);

// Weight of an edge given the occupancy mask of its 4 incident cells.
// Mask bit (da+1) + 2*(db+1) is the cell at quadrant offset (da, db),
// da, db in {-1, 0}.
double edge_weight(unsigned mask);

MinkowskiVector intrinsic_all(const CellGrid& grid);

// Same vector with only the V_k whose bit is set in k_mask filled in;
// the rest stay zero. Lets bulk runs skip the face census when only the
// cheap functionals are needed.
MinkowskiVector intrinsic_selected(const CellGrid& grid, unsigned k_mask);

// Inclusion-exclusion over all nonempty subsets of at most 20 unit cubes at
// integer positions; every subset intersection is a box with side lengths in
// {0,1}, whose V_k is binomial(#unit axes, k).
MinkowskiVector brute_force_intrinsic(const std::vector<std::array<std::int64_t, 3>>& cells, int d,
                                      double side);

}  // namespace fracperc
