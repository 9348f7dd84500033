// invbranch: numerical toolkit for inverse branches and singularities of
// entire functions -- continuation along curves, winding numbers, sublevel
// component ladders, a doubly exponential example function in log arithmetic,
// tree figures, and Poisson divergence checks.

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "invbranch/cli.hpp"
#include "invbranch/errors.hpp"

using invbranch::RunConfig;

namespace {

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path, "key=value config file (overrides flags)");
    sub->add_option("--function", cfg.function, "exp | sinc | tower | poly:c0;c1;...");
    sub->add_option("--threads", cfg.threads, "worker threads for grid fills (0 = auto)");
    sub->add_option("--out-json", cfg.out_json, "JSON report path");
    sub->add_option("--out-csv", cfg.out_csv, "CSV output path");
}

void add_window(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--center-re", cfg.window_cx, "window center, real part");
    sub->add_option("--center-im", cfg.window_cy, "window center, imaginary part");
    sub->add_option("--half-width", cfg.half_width, "window half-width");
    sub->add_option("--half-height", cfg.half_height, "window half-height");
    sub->add_option("--resolution", cfg.resolution, "grid cell side");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"invbranch: inverse-branch continuation and singularity tooling"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto* verify = app.add_subcommand("verify-example",
                                      "check the tower inequalities, arc counts and monotonicity");
    add_common(verify, cfg, config_path);
    verify->add_option("--epsilon", cfg.epsilon, "rational p/q in (0, 1/8]");
    verify->add_option("--level-lo", cfg.level_lo, "lowest level");
    verify->add_option("--level-hi", cfg.level_hi, "highest level");
    verify->add_option("--samples-per-set", cfg.samples_per_set, ">= 16");
    verify->add_option("--n-theta", cfg.n_theta, "circle samples (0 = smallest admissible)");
    verify->add_option("--arc-threshold", cfg.arc_threshold,
                       "sublevel threshold, e.g. log:-1:11.09 for -2^16");

    auto* render = app.add_subcommand("render-tree", "emit the tree figure as SVG");
    add_common(render, cfg, config_path);
    add_window(render, cfg);
    render->add_option("--epsilon", cfg.epsilon, "rational p/q in (0, 1/8]");
    render->add_option("--out-svg", cfg.out_svg, "SVG output path");
    render->add_option("--style-version", cfg.style_version, "drawing style version");

    auto* classify = app.add_subcommand("classify", "component ladder + singularity class");
    add_common(classify, cfg, config_path);
    add_window(classify, cfg);
    classify->add_option("--a-re", cfg.a_re, "target point, real part");
    classify->add_option("--a-im", cfg.a_im, "target point, imaginary part");
    classify->add_option("--radii", cfg.radii,
                         "decreasing level ladder; log:<sign>:<mag> entries allowed");

    auto* disc = app.add_subcommand("check-disconnected", "count preimage components of a disc");
    add_common(disc, cfg, config_path);
    add_window(disc, cfg);
    disc->add_option("--a-re", cfg.a_re, "omitted point, real part");
    disc->add_option("--a-im", cfg.a_im, "omitted point, imaginary part");
    disc->add_option("--disc-re", cfg.disc_re, "disc center, real part");
    disc->add_option("--disc-im", cfg.disc_im, "disc center, imaginary part");
    disc->add_option("--disc-radius", cfg.disc_radius, "disc radius");

    auto* lift = app.add_subcommand("lift", "continue an inverse branch along a curve");
    add_common(lift, cfg, config_path);
    lift->add_option("--curve", cfg.curve,
                     "circle:cx,cy,r,n[,start] | segment:x0,y0,x1,y1 | points:x,y;...[;closed]");
    auto* seed_re = lift->add_option("--seed-re", cfg.seed_re, "seed, real part");
    auto* seed_im = lift->add_option("--seed-im", cfg.seed_im, "seed, imaginary part");
    lift->add_option("--window-radius", cfg.window_radius, "escape radius");
    lift->add_option("--tol-track", cfg.tol_track, "tracking tolerance");
    lift->add_option("--perturb-epsilon", cfg.perturb_epsilon, "retry perturbation radius");
    lift->add_option("--max-retries", cfg.max_retries, "perturbed retries");

    auto* sweep = app.add_subcommand("sweep", "continue the branch along parallel lines");
    add_common(sweep, cfg, config_path);
    sweep->add_option("--disc-re", cfg.disc_re, "disc center, real part");
    sweep->add_option("--disc-im", cfg.disc_im, "disc center, imaginary part");
    sweep->add_option("--disc-radius", cfg.disc_radius, "disc radius");
    sweep->add_option("--seed-re", cfg.seed_re, "seed, real part");
    sweep->add_option("--seed-im", cfg.seed_im, "seed, imaginary part");
    sweep->add_option("--direction", cfg.direction, "line direction, radians");
    sweep->add_option("--n-lines", cfg.n_lines, "number of lines");
    sweep->add_option("--max-length", cfg.max_length, "half-length along each line");
    sweep->add_option("--window-radius", cfg.window_radius, "escape radius");

    auto* poisson = app.add_subcommand("poisson", "Poisson integral divergence scan");
    add_common(poisson, cfg, config_path);
    poisson->add_option("--measure", cfg.measure, "atom:theta:mass[+...] | cantor:depth:a:b:mass");
    poisson->add_option("--arc-a", cfg.arc_a, "arc start angle");
    poisson->add_option("--arc-b", cfg.arc_b, "arc end angle");
    poisson->add_option("--ladder", cfg.ladder, "geometric:k | comma list of radii in [0,1)");

    CLI11_PARSE(app, argc, argv);

    cfg.command = app.get_subcommands().front()->get_name();
    if (seed_re->count() || seed_im->count()) cfg.seed_set = true;
    if (sweep->parsed() && (sweep->count("--seed-re") || sweep->count("--seed-im")))
        cfg.seed_set = true;

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "error: cannot read config file %s\n", config_path.c_str());
            return 2;
        }
        std::ostringstream text;
        text << in.rdbuf();
        try {
            invbranch::parse_config_into(text.str(), cfg); // config overrides flags
        } catch (const invbranch::error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
    }
    return invbranch::run_command(cfg);
}
