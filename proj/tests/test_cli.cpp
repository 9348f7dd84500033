#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "invbranch/cli.hpp"
#include "invbranch/errors.hpp"

using namespace invbranch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path out_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "invbranch_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

} // namespace

TEST_CASE("parse_config fills defaults and validates") {
    const auto cfg = parse_config("command = verify-example\n"
                                  "epsilon = 1/16\n"
                                  "levels = 3..6\n");
    CHECK(cfg.command == "verify-example");
    CHECK(cfg.level_lo == 3);
    CHECK(cfg.level_hi == 6);
    CHECK(cfg.half_width == 80.0);
    CHECK(cfg.resolution == 0.25);
    CHECK(cfg.tol_track == 1e-8);
    CHECK(cfg.samples_per_set == 256);

    // epsilon outside (0, 1/8]
    CHECK_THROWS_AS(parse_config("epsilon = 1/4\n"), error);
    CHECK_THROWS_AS(parse_config("epsilon = 0/16\n"), error);

    // duplicate output paths
    CHECK_THROWS_AS(parse_config("out.json = a.json\nout.csv = a.json\n"), error);

    // unknown keys are rejected with a line diagnostic
    try {
        parse_config("command = lift\nwat = 7\n");
        FAIL("expected parse error");
    } catch (const error& e) {
        CHECK(e.code() == errc::parse_error);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    // comments and blank lines are fine
    CHECK_NOTHROW(parse_config("# comment\n\ncommand = sweep # trailing\n"));
}

TEST_CASE("signed-log thresholds parse in config lists") {
    RunConfig cfg;
    parse_config_into("radii = log:-1:2.302585092994046, log:-1:5.703782474656201\n", cfg);
    REQUIRE(cfg.radii.size() == 2);
    CHECK(parse_signed_log(cfg.radii[0]).value() == doctest::Approx(-10.0));
    CHECK(parse_signed_log(cfg.radii[1]).value() == doctest::Approx(-300.0));
}

TEST_CASE("classify command: sinc over 0 is indirect") {
    RunConfig cfg;
    cfg.command = "classify";
    cfg.function = "sinc";
    cfg.half_width = cfg.half_height = 10.0;
    cfg.resolution = 0.05;
    cfg.radii = {"0.3", "0.1"};
    cfg.out_json = (out_dir() / "classify_sinc.json").string();
    REQUIRE(run_command(cfg) == 0);

    const json rep = slurp_json(cfg.out_json);
    CHECK(rep["schema_version"] == "1");
    CHECK(rep["classification"] == "indirect_candidate");
    CHECK(rep["nodes"].size() >= 2);

    // identical config produces byte-identical output
    const std::string first = slurp(cfg.out_json);
    REQUIRE(run_command(cfg) == 0);
    CHECK(slurp(cfg.out_json) == first);
}

TEST_CASE("classify command: exp over 0 is direct") {
    RunConfig cfg;
    cfg.command = "classify";
    cfg.function = "exp";
    cfg.half_width = cfg.half_height = 12.0;
    cfg.resolution = 0.1;
    cfg.radii = {"0.5", "0.1", "0.02"};
    cfg.out_json = (out_dir() / "classify_exp.json").string();
    cfg.out_csv = (out_dir() / "classify_exp_cells.csv").string();
    REQUIRE(run_command(cfg) == 0);
    const json rep = slurp_json(cfg.out_json);
    CHECK(rep["classification"] == "direct_candidate");
    CHECK(rep["splitting_detected"] == false);

    const std::string csv = slurp(cfg.out_csv);
    CHECK(csv.rfind("rung,component,cell_re,cell_im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') > 100);
}

TEST_CASE("check-disconnected command and exit codes") {
    RunConfig cfg;
    cfg.command = "check-disconnected";
    cfg.function = "exp";
    cfg.a_re = 0.0;
    cfg.disc_re = 1.0;
    cfg.disc_radius = 0.5;
    cfg.half_width = 5.0;
    cfg.half_height = 10.0;
    cfg.resolution = 0.05;
    cfg.out_json = (out_dir() / "disc.json").string();
    CHECK(run_command(cfg) == 0);
    json rep = slurp_json(cfg.out_json);
    CHECK(rep["component_count"] == 3);
    CHECK(rep["verdict"] == "disconnected (witnessed)");

    // a window too small to see the translates is inconclusive -> exit 1
    cfg.half_width = cfg.half_height = 2.0;
    cfg.out_json = (out_dir() / "disc_small.json").string();
    CHECK(run_command(cfg) == 1);
    rep = slurp_json(cfg.out_json);
    CHECK(rep["component_count"] == 1);
    CHECK(rep["verdict"] == "inconclusive");
}

TEST_CASE("lift command writes the path") {
    RunConfig cfg;
    cfg.command = "lift";
    cfg.function = "exp";
    cfg.curve = "circle:0,0,1,64";
    cfg.seed_set = true;
    cfg.seed_re = cfg.seed_im = 0.0;
    cfg.out_json = (out_dir() / "lift.json").string();
    cfg.out_csv = (out_dir() / "lift.csv").string();
    CHECK(run_command(cfg) == 0);
    const json rep = slurp_json(cfg.out_json);
    CHECK(rep["status"] == "completed");
    CHECK(rep["terminal_parameter"] == 1.0);
    const double end_im = rep["endpoint"][1].get<double>();
    CHECK(end_im == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    CHECK(slurp(cfg.out_csv).rfind("t,re,im\n", 0) == 0);

    // a lift into a branch point reports failure with exit 1
    cfg.function = "poly:0;0;1";
    cfg.curve = "segment:1,0,0,0";
    cfg.seed_re = 1.0;
    cfg.out_json = (out_dir() / "lift_crit.json").string();
    cfg.out_csv.clear();
    CHECK(run_command(cfg) == 1);
    CHECK(slurp_json(cfg.out_json)["status"] == "hit_critical_point");
}

TEST_CASE("sweep command") {
    RunConfig cfg;
    cfg.command = "sweep";
    cfg.function = "exp";
    cfg.disc_re = 2.0;
    cfg.disc_radius = 0.5;
    cfg.seed_set = true;
    cfg.seed_re = std::log(2.0);
    cfg.n_lines = 21;
    cfg.max_length = 10.0;
    cfg.window_radius = 60.0;
    cfg.out_json = (out_dir() / "sweep.json").string();
    CHECK(run_command(cfg) == 0);
    const json rep = slurp_json(cfg.out_json);
    CHECK(rep["n_lines"] == 21);
    CHECK(rep["failed_line_indices"].size() == 1); // the center line hits 0
    CHECK(rep["failed_line_indices"][0] == 10);
}

TEST_CASE("poisson command emits the ladder CSV") {
    RunConfig cfg;
    cfg.command = "poisson";
    cfg.measure = "atom:0:1";
    cfg.arc_a = -1.0;
    cfg.arc_b = 1.0;
    cfg.ladder = "geometric:12";
    cfg.out_csv = (out_dir() / "poisson.csv").string();
    cfg.out_json = (out_dir() / "poisson.json").string();
    CHECK(run_command(cfg) == 0);
    const std::string csv = slurp(cfg.out_csv);
    CHECK(csv.rfind("r,theta,u\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13); // header + 12 rungs
    CHECK(slurp_json(cfg.out_json)["all_bounds_hold"] == true);

    // an arc with no mass is a usage error -> exit 2
    cfg.arc_a = 2.0;
    cfg.arc_b = 3.0;
    CHECK(run_command(cfg) == 2);
}

TEST_CASE("render-tree command is deterministic") {
    RunConfig cfg;
    cfg.command = "render-tree";
    cfg.out_svg = (out_dir() / "tree.svg").string();
    cfg.out_json = (out_dir() / "tree.json").string();
    CHECK(run_command(cfg) == 0);
    const std::string first = slurp(cfg.out_svg);
    CHECK(first.find("<svg") != std::string::npos);
    CHECK(run_command(cfg) == 0);
    CHECK(slurp(cfg.out_svg) == first);

    const json rep = slurp_json(cfg.out_json);
    CHECK(rep["n_max"] == 5);
    CHECK(rep["spoke_counts"][3]["fully_visible_spokes"] == 16);
}

TEST_CASE("verify-example on a reduced range") {
    RunConfig cfg;
    cfg.command = "verify-example";
    cfg.level_lo = 4;
    cfg.level_hi = 5;
    cfg.samples_per_set = 32;
    cfg.out_json = (out_dir() / "verify.json").string();
    CHECK(run_command(cfg) == 0);
    const json rep = slurp_json(cfg.out_json);
    CHECK(rep["pass"] == true);
    CHECK(rep["inequalities"]["all_pass"] == true);
    CHECK(rep["arc_counts"][0]["arc_count"] == 16);
    CHECK(rep["arc_counts"][1]["arc_count"] == 32);
    CHECK(rep["monotonicity"][0]["min_re"].get<double>() > 0.0);

    // failure of a check still writes the report and exits 1: level 3 fails
    cfg.level_lo = cfg.level_hi = 3;
    cfg.out_json = (out_dir() / "verify3.json").string();
    CHECK(run_command(cfg) == 1);
    CHECK(slurp_json(cfg.out_json)["pass"] == false);
}

TEST_CASE("run_command maps errors to exit codes") {
    RunConfig cfg;
    cfg.command = "no-such-command";
    CHECK(run_command(cfg) == 2);

    // numerical failure: resolution too coarse -> exit 3, report still written
    cfg.command = "classify";
    cfg.function = "poly:0;0;1";
    cfg.window_cx = -0.025;
    cfg.window_cy = -0.025;
    cfg.half_width = cfg.half_height = 2.0;
    cfg.resolution = 0.05;
    cfg.radii = {"0.01", "0.0001"};
    cfg.out_json = (out_dir() / "coarse.json").string();
    CHECK(run_command(cfg) == 3);
    const json rep = slurp_json(cfg.out_json);
    CHECK(rep["error"]["code"] == "RESOLUTION_TOO_COARSE");
}
