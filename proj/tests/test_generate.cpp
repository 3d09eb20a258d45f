#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>
#include <vector>

#include "fracperc/generate.hpp"

using namespace fracperc;

namespace {

std::vector<std::int64_t> cell_codes(const CellGrid& g) {
    std::vector<std::int64_t> out;
    g.for_each_cell([&](std::int64_t c) { out.push_back(c); });
    return out;
}

}  // namespace

TEST_CASE("per-level counts equal the occupied cells of each grid") {
    ModelParams P;
    P.d = 2;
    P.M = 3;
    P.p = 0.6;
    P.n_max = 4;
    P.seed = 11;
    Realization r = generate(P);
    REQUIRE(int(r.grids.size()) == P.n_max + 1);
    for (int n = 0; n <= P.n_max; ++n) CHECK(r.occupied_count(n) == r.grids[std::size_t(n)].count);
    CHECK(r.occupied_count(0) == 1);
}

TEST_CASE("children never appear under a vacant parent") {
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.7;
    P.n_max = 6;
    P.seed = 5;
    Realization r = generate(P);
    for (int n = 1; n <= P.n_max; ++n) {
        const CellGrid& child = r.grids[std::size_t(n)];
        const CellGrid& parent = r.grids[std::size_t(n - 1)];
        bool ok = true;
        child.for_each_cell([&](std::int64_t code) {
            std::array<std::int64_t, 3> x = child.decode(code);
            for (int a = 0; a < P.d; ++a) x[std::size_t(a)] /= P.M;
            ok = ok && parent.occupied(parent.encode(x));
        });
        CHECK(ok);
    }
}

TEST_CASE("generation is deterministic in the seed and differs across seeds") {
    ModelParams P;
    P.d = 2;
    P.M = 3;
    P.p = 0.6;
    P.n_max = 4;
    P.seed = 1;
    Realization a = generate(P);
    Realization b = generate(P);
    for (int n = 0; n <= P.n_max; ++n)
        CHECK(cell_codes(a.grids[std::size_t(n)]) == cell_codes(b.grids[std::size_t(n)]));
    P.seed = 2;
    Realization c = generate(P);
    bool any_diff = false;
    for (int n = 1; n <= P.n_max; ++n)
        any_diff = any_diff ||
                   cell_codes(a.grids[std::size_t(n)]) != cell_codes(c.grids[std::size_t(n)]);
    CHECK(any_diff);
}

TEST_CASE("full retention keeps every cell at every level") {
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 1.0;
    P.n_max = 5;
    P.seed = 3;
    Realization r = generate(P);
    for (int n = 0; n <= P.n_max; ++n) CHECK(r.occupied_count(n) == ipow64(4, n));
}

TEST_CASE("an extinct line stays empty at all deeper levels") {
    ModelParams P;
    P.d = 1;
    P.M = 2;
    P.p = 0.05;
    P.n_max = 8;
    // hunt a seed that dies out early, then check monotonicity
    for (std::uint64_t s = 0; s < 50; ++s) {
        P.seed = s;
        Realization r = generate(P);
        bool dead = false;
        for (int n = 0; n <= P.n_max; ++n) {
            if (dead) CHECK(r.occupied_count(n) == 0);
            if (r.occupied_count(n) == 0) dead = true;
        }
        if (dead) return;
    }
    FAIL("no extinction in 50 subcritical realizations");
}

TEST_CASE("subpopulations partition each level") {
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.8;
    P.n_max = 4;
    P.seed = 17;
    Realization r = generate(P);
    for (int n = 1; n <= P.n_max; ++n) {
        std::vector<std::int64_t> merged;
        std::int64_t total = 0;
        for (int j = 1; j <= int(P.branching()); ++j) {
            CellGrid sub = subpopulation(r, j, n);
            total += sub.count;
            for (std::int64_t c : cell_codes(sub)) merged.push_back(c);
        }
        CHECK(total == r.occupied_count(n));
        std::sort(merged.begin(), merged.end());
        CHECK(merged == cell_codes(r.grids[std::size_t(n)]));
    }
}

TEST_CASE("a subtree regenerates from its key alone") {
    ModelParams P;
    P.d = 2;
    P.M = 3;
    P.p = 0.55;
    P.n_max = 3;
    P.seed = 23;
    Realization r = generate(P);
    for (int j = 1; j <= int(P.branching()); ++j)
        for (int n = 1; n <= P.n_max; ++n) {
            CellGrid again = regenerate_subtree(P, j, n);
            CellGrid sub = subpopulation(r, j, n);
            CHECK(cell_codes(again) == cell_codes(sub));
        }
}

TEST_CASE("an order-2 intersection realization equals squared-retention generation") {
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.9;
    P.n_max = 4;
    P.seed = 29;
    Realization a = generate_intersection(P, 2);
    ModelParams Q = P;
    Q.p = P.p * P.p;
    Realization b = generate(Q);
    for (int n = 0; n <= P.n_max; ++n)
        CHECK(cell_codes(a.grids[std::size_t(n)]) == cell_codes(b.grids[std::size_t(n)]));
}

TEST_CASE("intersecting grids keeps exactly the common cells") {
    ModelParams A;
    A.d = 2;
    A.M = 2;
    A.p = 0.8;
    A.n_max = 3;
    A.seed = 31;
    ModelParams B = A;
    B.seed = 37;
    Realization ra = generate(A);
    Realization rb = generate(B);
    CellGrid inter = intersect_grids(ra.grids[3], rb.grids[3]);
    bool ok = true;
    inter.for_each_cell([&](std::int64_t c) {
        ok = ok && ra.grids[3].occupied(c) && rb.grids[3].occupied(c);
    });
    CHECK(ok);
    std::int64_t both = 0;
    ra.grids[3].for_each_cell([&](std::int64_t c) {
        if (rb.grids[3].occupied(c)) ++both;
    });
    CHECK(inter.count == both);
}

TEST_CASE("grid dumps carry a header and one line per level") {
    ModelParams P;
    P.d = 2;
    P.M = 2;
    P.p = 0.7;
    P.n_max = 3;
    P.seed = 41;
    Realization r = generate(P);
    std::ostringstream os;
    dump_grids(r, os);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line.rfind("FRACPERC v1 ", 0) == 0);
    int lines = 0;
    while (std::getline(is, line))
        if (!line.empty()) ++lines;
    CHECK(lines == P.n_max + 1);
}

TEST_CASE("a tiny cell budget surfaces as a capacity error") {
    ModelParams P;
    P.d = 2;
    P.M = 3;
    P.p = 1.0;
    P.n_max = 6;
    P.seed = 1;
    P.cell_budget = 64;
    CHECK_THROWS_AS(generate(P), CapacityError);
}
