#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tctank/config.hpp"

using namespace tctank;
namespace fs = std::filesystem;

namespace {

const char* tank_json = R"({
    "L1": "300p", "L2": "210p", "L3": "117p",
    "C1": "200f", "C2": "150f", "C3": "80f",
    "k12": 0.3, "k13": 0.2, "k23": 0.25
})";

std::string tmp_path(const std::string& name) {
    return (fs::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// run() talks to stdout/stderr; capture both for assertions
struct CapturedRun {
    int status = -1;
    std::string out;
    std::string err;
};

CapturedRun run_captured(const RunConfig& cfg) {
    std::ostringstream out, err;
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    CapturedRun r;
    r.status = run(cfg);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

} // namespace

TEST_CASE("config parse and canonical round trip") {
    const std::string text = std::string(R"({
        "command": "analyze",
        "tank": )") + tank_json + R"(,
        "grid": {"start_hz": "5G", "stop_hz": "70G", "points": 11,
                 "spacing": "logarithmic"},
        "method": "closed_form",
        "output": {"path": "out.csv", "format": "csv"},
        "seed": 7
    })";

    const RunConfig c = parse_config(text, "test");
    REQUIRE(c.command.has_value());
    CHECK(*c.command == Command::analyze);
    REQUIRE(c.tank.has_value());
    CHECK(c.tank->l1 == doctest::Approx(300e-12).epsilon(1e-15));
    REQUIRE(c.grid.has_value());
    CHECK(c.grid->start_hz == 5e9);
    CHECK(c.grid->stop_hz == 70e9);
    CHECK(c.grid->points == 11);
    CHECK(c.grid->spacing == GridSpacing::logarithmic);
    REQUIRE(c.method.has_value());
    CHECK(*c.method == SweepMethod::closed_form);
    CHECK(c.output.path == "out.csv");
    CHECK(c.seed == 7);

    const std::string canon = config_to_json_string(c);
    const RunConfig again = parse_config(canon, "round-trip");
    CHECK(config_to_json_string(again) == canon);
}

TEST_CASE("unknown keys are named with their line") {
    const std::string text = R"({
        "command": "modes",
        "tank": {
            "L1": 3e-10, "L2": 2.1e-10, "L3": 1.17e-10,
            "C1": 2e-13, "C2": 1.5e-13, "C3": 8e-14,
            "k12": 0.3, "k13": 0.2, "k23": 0.25,
            "C4": 1e-13
        }
    })";
    try {
        parse_config(text, "test");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("C4") != std::string::npos);
        CHECK(msg.find("line 7") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config(R"({"comand": "modes"})", "test"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("{not json", "test"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"(["array"])", "test"), ConfigError);
}

TEST_CASE("sweep and design sections parse") {
    const std::string text = R"({
        "command": "sweep",
        "sweep": {"x_min": 2, "x_max": 12, "x_points": 5,
                  "k12_values": [0.1, 0.3], "k13_values": [0.2],
                  "k23_values": [0.25], "constraint": "nu2_equals_nu3"},
        "design": {"f0_target_hz": "24G", "band_center_ratio": 3,
                   "fractional_bandwidth_target": 0.3,
                   "k23_range": [0.2, 0.3],
                   "fixed_inductances": ["300p", "210p", "117p"],
                   "search_budget": 5000}
    })";
    const RunConfig c = parse_config(text, "test");
    REQUIRE(c.sweep.has_value());
    CHECK(c.sweep->x_points == 5);
    CHECK(c.sweep->k12_values == std::vector<double>{0.1, 0.3});
    REQUIRE(c.design.has_value());
    CHECK(c.design->f0_target_hz == 24e9);
    CHECK(c.design->search_budget == 5000);
    REQUIRE(c.design->fixed_inductances.has_value());
    CHECK((*c.design->fixed_inductances)[2] ==
          doctest::Approx(117e-12).epsilon(1e-15));

    // defaults fill what the section left out
    CHECK(c.design->k12_range.lo == 0.05);
    CHECK(c.design->k12_range.hi == 0.7);
    CHECK(c.design->x_range.lo == 1.0);
    CHECK(c.design->x_range.hi == 20.0);
}

TEST_CASE("load_config reads files") {
    const std::string path = tmp_path("tctank_cfg_load.json");
    {
        std::ofstream out(path);
        out << R"({"command": "fom", "fom": {"pn_dbchz": -115.59,
            "f0_hz": "23.99G", "offset_hz": "1M", "p_mw": 5.4,
            "area_mm2": 0.02268, "f_min_hz": "21.03G",
            "f_max_hz": "23.99G"}})";
    }
    const RunConfig c = load_config(path);
    REQUIRE(c.fom.has_value());
    CHECK(c.fom->f0_hz == 23.99e9);
    CHECK(c.fom->offset_hz == 1e6);
    fs::remove(path);

    CHECK_THROWS_AS(load_config(tmp_path("tctank_missing.json")),
                    ConfigError);
}

TEST_CASE("run: modes artifact") {
    RunConfig cfg;
    cfg.command = Command::modes;
    cfg.tank = params_from_json_string(tank_json);
    cfg.output.path = tmp_path("tctank_modes_out.json");

    const CapturedRun r = run_captured(cfg);
    CHECK(r.status == 0);
    CHECK(r.out.find("modes:") != std::string::npos);
    CHECK(r.out.find(cfg.output.path) != std::string::npos);

    const std::string artifact = slurp(cfg.output.path);
    for (const char* key :
         {"\"coefficients\"", "\"c3\"", "\"modes_hz\"", "\"ratios\"",
          "\"degenerate\"", "\"cubic_degenerate\"",
          "\"method_agreement_rel_err\""})
        CHECK(artifact.find(key) != std::string::npos);
    CHECK(artifact.find("19634992350.4") != std::string::npos);
    CHECK_FALSE(fs::exists(cfg.output.path + ".tmp"));
    fs::remove(cfg.output.path);
}

TEST_CASE("run: artifacts are byte identical across runs") {
    RunConfig cfg;
    cfg.command = Command::modes;
    cfg.tank = params_from_json_string(tank_json);
    cfg.output.path = tmp_path("tctank_det_a.json");
    REQUIRE(run_captured(cfg).status == 0);
    const std::string a = slurp(cfg.output.path);
    fs::remove(cfg.output.path);

    cfg.output.path = tmp_path("tctank_det_b.json");
    REQUIRE(run_captured(cfg).status == 0);
    const std::string b = slurp(cfg.output.path);
    fs::remove(cfg.output.path);

    CHECK(!a.empty());
    CHECK(a == b);
}

TEST_CASE("run: analyze defaults to csv on stdout") {
    RunConfig cfg;
    cfg.command = Command::analyze;
    cfg.tank = params_from_json_string(tank_json);
    FrequencyGrid g;
    g.start_hz = 5e9;
    g.stop_hz = 70e9;
    g.points = 16;
    cfg.grid = g;

    const CapturedRun r = run_captured(cfg);
    CHECK(r.status == 0);
    CHECK(r.out.rfind("freq_hz,re_z_ohm,im_z_ohm,mag_z_ohm,flag\n", 0) == 0);
    CHECK(r.err.find("analyze: 16 points") != std::string::npos);
    size_t lines = 0;
    for (char ch : r.out)
        lines += ch == '\n' ? 1 : 0;
    CHECK(lines == 17);
}

TEST_CASE("run: fom prints the frozen figures") {
    RunConfig cfg;
    cfg.command = Command::fom;
    OscMetricsInput in;
    in.pn_dbchz = -115.59;
    in.f0_hz = 23.99e9;
    in.offset_hz = 1e6;
    in.p_mw = 5.4;
    in.area_mm2 = 0.02268;
    in.f_min_hz = 21.03e9;
    in.f_max_hz = 23.99e9;
    cfg.fom = in;

    const CapturedRun r = run_captured(cfg);
    CHECK(r.status == 0);
    CHECK(r.out.find("\"tr_pct\": 13.149711239449134") != std::string::npos);
    CHECK(r.out.find("\"fom\": 195.86666736112693") != std::string::npos);
    CHECK(r.out.find("\"fom_t\": 198.2449916822953") != std::string::npos);
    CHECK(r.out.find("\"fom_a\": 212.31023685891824") != std::string::npos);
}

TEST_CASE("run: error paths and exit codes") {
    // no command
    CHECK(run_captured(RunConfig{}).status == 2);

    // modes without a tank
    RunConfig cfg;
    cfg.command = Command::modes;
    CapturedRun r = run_captured(cfg);
    CHECK(r.status == 2);
    CHECK(r.err.find("\"error\"") != std::string::npos);
    CHECK(r.err.find("tank") != std::string::npos);

    // modes artifact cannot be csv
    cfg.tank = params_from_json_string(tank_json);
    cfg.output.format = OutputFormat::csv;
    CHECK(run_captured(cfg).status == 2);

    // invalid tank values are a validation error
    cfg = RunConfig{};
    cfg.command = Command::modes;
    cfg.tank = params_from_json_string(tank_json);
    cfg.tank->k12 = 1.4;
    r = run_captured(cfg);
    CHECK(r.status == 2);
    CHECK(r.err.find("k12") != std::string::npos);

    // unwritable output path
    cfg = RunConfig{};
    cfg.command = Command::modes;
    cfg.tank = params_from_json_string(tank_json);
    cfg.output.path = "/nonexistent-dir/tctank.json";
    CHECK(run_captured(cfg).status == 2);
}

TEST_CASE("run: infeasible design exits 3 but writes the artifact") {
    RunConfig cfg;
    cfg.command = Command::design;
    DesignSpec spec;
    spec.band_center_ratio = 50.0;
    spec.k12_range = {-0.3, 0.3};
    spec.k13_range = {-0.3, 0.3};
    spec.k23_range = {-0.3, 0.3};
    spec.search_budget = 2000;
    cfg.design = spec;
    cfg.output.path = tmp_path("tctank_design_infeasible.json");

    const CapturedRun r = run_captured(cfg);
    CHECK(r.status == 3);
    CHECK(r.out.find("no feasible design") != std::string::npos);
    const std::string artifact = slurp(cfg.output.path);
    CHECK(artifact.find("\"feasible\": false") != std::string::npos);
    fs::remove(cfg.output.path);
}
