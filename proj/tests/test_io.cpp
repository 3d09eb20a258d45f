#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "fracperc/io.hpp"

using namespace fracperc;

namespace {

RunConfig exercised_config() {
    RunConfig c;
    c.params.d = 3;
    c.params.M = 3;
    c.params.p = 0.65;
    c.params.n_max = 7;
    c.params.seed = 123456789;
    c.params.cell_budget = 1 << 20;
    c.reps = 2500;
    c.out = "table.csv";
    c.trajectories_out = "traj.ndjson";
    c.condition_nonextinct = true;
    c.tolerance = 1e-9;
    c.series_mc_reps = 4000;
    c.sweep_p_min = 0.3;
    c.sweep_p_max = 0.9;
    c.sweep_p_steps = 4;
    return c;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("a config survives the emit and parse round trip unchanged") {
    RunConfig c = exercised_config();
    CHECK(parse_config(emit_config(c)) == c);
    RunConfig d;
    CHECK(parse_config(emit_config(d)) == d);
}

TEST_CASE("absent config fields keep their defaults") {
    RunConfig base;
    RunConfig c = parse_config("{\"p\": 0.8, \"reps\": 77}");
    CHECK(c.params.p == 0.8);
    CHECK(c.reps == 77);
    CHECK(c.params.d == base.params.d);
    CHECK(c.params.M == base.params.M);
    CHECK(c.out == base.out);
    CHECK(parse_config("{}") == base);
}

TEST_CASE("malformed or unrecognized config input is refused") {
    CHECK_THROWS_AS(parse_config("{\"p\": 0.8"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2, 3]"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"retention\": 0.8}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"p\": \"high\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"reps\": [1]}"), ConfigError);
    CHECK_THROWS_AS(parse_config("{\"out\": 5}"), ConfigError);
}

TEST_CASE("config files load from disk and missing paths are an error") {
    auto dir = std::filesystem::temp_directory_path();
    auto path = dir / "fracperc_io_test_config.json";
    RunConfig c = exercised_config();
    {
        std::ofstream out(path, std::ios::binary);
        out << emit_config(c);
    }
    CHECK(load_config_file(path.string()) == c);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_config_file(path.string()), ConfigError);
}

TEST_CASE("numbers are printed at shortest round-trip precision") {
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.7) == "0.7");
    CHECK(format_number(0.0525) == "0.0525");
    CHECK(format_number(-3.5) == "-3.5");
    for (double v : {1.0 / 3.0, 1e-8, 6.02e23, 0.1 + 0.2}) {
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("output files appear atomically with no leftover staging file") {
    auto dir = std::filesystem::temp_directory_path();
    auto path = dir / "fracperc_io_test_out.csv";
    write_text_atomic(path.string(), "a,b\n1,2\n");
    CHECK(read_file(path) == "a,b\n1,2\n");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    write_text_atomic(path.string(), "a,b\n3,4\n");
    CHECK(read_file(path) == "a,b\n3,4\n");
    std::filesystem::remove(path);
}

TEST_CASE("an empty output path streams to standard output") {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    write_text_atomic("", "hello\n");
    std::cout.rdbuf(old);
    CHECK(captured.str() == "hello\n");
}
