#pragma once

#include <string>
#include <vector>

#include "fracperc/params.hpp"

namespace fracperc {

/// One run manifest: model parameters plus command knobs. Serializes to a
/// JSON object and parses back losslessly; unknown keys are rejected.
struct RunConfig {
    ModelParams params;
    std::int64_t reps = 10000;
    std::string out;
    std::string trajectories_out;
    bool condition_nonextinct = false;
    double tolerance = 1e-6;
    int series_mc_reps = 0;
    // Retention sweep for the limit table; steps = 0 means the single params.p.
    double sweep_p_min = 0.0;
    double sweep_p_max = 0.0;
    int sweep_p_steps = 0;

    bool operator==(const RunConfig&) const = default;
};

std::string emit_config(const RunConfig& config);
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Shortest decimal that parses back to the same double.
std::string format_number(double v);

// Writes to path via a temporary file and rename, so no partial file is ever
// visible. An empty path writes to stdout instead.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace fracperc
