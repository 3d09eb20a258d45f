#include "fracperc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace fracperc {

namespace {

using nlohmann::json;

const char* const kKeys[] = {"d",
                             "M",
                             "p",
                             "n",
                             "seed",
                             "cell_budget",
                             "reps",
                             "out",
                             "trajectories_out",
                             "condition_nonextinct",
                             "tolerance",
                             "series_mc_reps",
                             "sweep_p_min",
                             "sweep_p_max",
                             "sweep_p_steps"};

}  // namespace

std::string emit_config(const RunConfig& c) {
    json j;
    j["d"] = c.params.d;
    j["M"] = c.params.M;
    j["p"] = c.params.p;
    j["n"] = c.params.n_max;
    j["seed"] = c.params.seed;
    j["cell_budget"] = c.params.cell_budget;
    j["reps"] = c.reps;
    j["out"] = c.out;
    j["trajectories_out"] = c.trajectories_out;
    j["condition_nonextinct"] = c.condition_nonextinct;
    j["tolerance"] = c.tolerance;
    j["series_mc_reps"] = c.series_mc_reps;
    j["sweep_p_min"] = c.sweep_p_min;
    j["sweep_p_max"] = c.sweep_p_max;
    j["sweep_p_steps"] = c.sweep_p_steps;
    return j.dump(2) + "\n";
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : kKeys) known = known || item.key() == k;
        if (!known) throw ConfigError("unknown config key: " + item.key());
    }
    RunConfig c;
    try {
        if (j.contains("d")) c.params.d = j["d"].get<int>();
        if (j.contains("M")) c.params.M = j["M"].get<int>();
        if (j.contains("p")) c.params.p = j["p"].get<double>();
        if (j.contains("n")) c.params.n_max = j["n"].get<int>();
        if (j.contains("seed")) c.params.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("cell_budget")) c.params.cell_budget = j["cell_budget"].get<std::int64_t>();
        if (j.contains("reps")) c.reps = j["reps"].get<std::int64_t>();
        if (j.contains("out")) c.out = j["out"].get<std::string>();
        if (j.contains("trajectories_out"))
            c.trajectories_out = j["trajectories_out"].get<std::string>();
        if (j.contains("condition_nonextinct"))
            c.condition_nonextinct = j["condition_nonextinct"].get<bool>();
        if (j.contains("tolerance")) c.tolerance = j["tolerance"].get<double>();
        if (j.contains("series_mc_reps")) c.series_mc_reps = j["series_mc_reps"].get<int>();
        if (j.contains("sweep_p_min")) c.sweep_p_min = j["sweep_p_min"].get<double>();
        if (j.contains("sweep_p_max")) c.sweep_p_max = j["sweep_p_max"].get<double>();
        if (j.contains("sweep_p_steps")) c.sweep_p_steps = j["sweep_p_steps"].get<int>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string format_number(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write output file: " + tmp);
        out << content;
        if (!out) throw ConfigError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw ConfigError("cannot move output into place: " + path);
    }
}

}  // namespace fracperc
