#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fracperc {

// Raised when a requested grid would exceed the configured cell budget.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Raised on invalid model or run configuration.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Model parameters of a fractal percolation on [0,1]^d: the unit cube is
/// recursively split into M^d subcubes and each is kept independently with
/// probability p, down to level n_max.
struct ModelParams {
    int d = 2;
    int M = 2;
    double p = 0.5;
    int n_max = 1;
    std::uint64_t seed = 0;
    std::int64_t cell_budget = std::int64_t(1) << 31;

    bool operator==(const ModelParams&) const = default;

    void validate() const {
        if (d < 1 || d > 3) throw ConfigError("dimension must be between 1 and 3");
        if (M < 2) throw ConfigError("subdivision factor must be >= 2");
        if (!(p > 0.0) || p > 1.0) throw ConfigError("retention probability must be in (0,1]");
        if (n_max < 0) throw ConfigError("deepest level must be >= 0");
        if (cell_budget < 1) throw ConfigError("cell budget must be positive");
    }

    // Similarity dimension of the limit set.
    double dimension() const { return std::log(std::pow(double(M), d) * p) / std::log(double(M)); }

    std::int64_t branching() const {
        std::int64_t b = 1;
        for (int a = 0; a < d; ++a) b *= M;
        return b;
    }

    bool supercritical() const { return double(branching()) * p > 1.0; }
};

// M^n as a 64-bit integer, throwing when it cannot be represented.
inline std::int64_t ipow64(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (std::int64_t(1) << 62) / base) throw CapacityError("integer power overflow");
        r *= base;
    }
    return r;
}

}  // namespace fracperc
