#pragma once

#include <cstdint>

namespace fracperc {

/// Counter-based randomness keyed by cell identity. Every retention mark is a
/// pure function of (master seed, path of subdivision indices from the root),
/// so any subtree can be regenerated independently of evaluation order and
/// parallel generation needs no coordination.
namespace rng {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4b911ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Key of the root cell for a given master seed.
inline std::uint64_t root_key(std::uint64_t seed) {
    return mix(seed ^ 0x6a09e667f3bcc908ull);
}

// Key of the child with subdivision index idx (0 .. M^d-1) under parent_key.
inline std::uint64_t child_key(std::uint64_t parent_key, std::uint64_t idx) {
    return mix(parent_key ^ (0x9e3779b97f4a7c15ull * (idx + 1)));
}

// Uniform double in [0,1) derived from a key, independent of the key chain.
inline double uniform(std::uint64_t key) {
    return double(mix(key ^ 0xd1b54a32d192ed03ull) >> 11) * 0x1.0p-53;
}

inline bool bernoulli(std::uint64_t key, double p) { return uniform(key) < p; }

// Seed for replication r of an experiment with the given master seed.
inline std::uint64_t replication_seed(std::uint64_t master, std::uint64_t r) {
    return mix(master ^ mix(r ^ 0x2545f4914f6cdd1dull));
}

}  // namespace rng
}  // namespace fracperc
