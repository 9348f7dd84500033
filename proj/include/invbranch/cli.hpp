#pragma once

#include <string>
#include <vector>

#include "invbranch/functions.hpp"

namespace invbranch {

/// Parsed run configuration shared by the command-line flags and the
/// key=value config file; the config file overrides flags.
/// Defaults: epsilon 1/16, window half-extents 80, resolution 0.25,
/// tol_track 1e-8.
struct RunConfig {
    std::string command;

    std::string function = "exp"; // exp | sinc | tower | poly:<re[,im]>;<re[,im]>;...
    double a_re = 0.0, a_im = 0.0;

    double window_cx = 0.0, window_cy = 0.0;
    double half_width = 80.0, half_height = 80.0;
    double resolution = 0.25;

    std::string epsilon = "1/16"; // rational p/q in (0, 1/8]
    int level_lo = 4, level_hi = 8;
    std::vector<std::string> radii; // ladder levels; "log:<sign>:<mag>" allowed
    std::string arc_threshold;      // count-arcs threshold override
    int samples_per_set = 256;
    int n_theta = 0; // 0 = smallest admissible per level
    int n_lines = 101;
    int n_seeds = 8;

    double disc_re = 1.0, disc_im = 0.0, disc_radius = 0.5;
    double seed_re = 0.0, seed_im = 0.0;
    bool seed_set = false;
    double direction = 0.0;
    double max_length = 10.0;
    double window_radius = 40.0;
    double tol_track = 1e-8;
    double perturb_epsilon = 0.0;
    int max_retries = 8;
    std::string curve; // circle:cx,cy,r,n[,start] | segment:x0,y0,x1,y1 | points:x,y;...[;closed]

    std::string measure = "atom:0:1"; // atom:theta:mass[+...] | cantor:depth:a:b:mass
    double arc_a = -1.0, arc_b = 1.0;
    std::string ladder = "geometric:20"; // geometric:k_max | comma list of radii

    std::string out_json, out_csv, out_svg;
    int style_version = 1;
    int threads = 0;
};

/// Parse a key=value config document ('#' comments, blank lines ignored) on
/// top of the defaults.  Unknown keys and malformed values raise PARSE_ERROR
/// with a line diagnostic.
RunConfig parse_config(const std::string& text);

/// Patch an existing config with the keys present in the document.
void parse_config_into(const std::string& text, RunConfig& config);

/// Validate cross-field invariants (epsilon range, distinct output paths, ...).
void validate_config(const RunConfig& config);

double parse_epsilon(const std::string& text); // rational "p/q" in (0, 1/8]

EntireFunctionSpec function_from_config(const RunConfig& config);

/// Execute the configured command, writing any requested artifacts.
/// Exit codes: 0 all checks passed, 1 a verification failed (report still
/// written), 2 usage/config error, 3 numerical failure.
int run_command(const RunConfig& config);

} // namespace invbranch
