#include "invbranch/cli.hpp"
#include "invbranch/components.hpp"
#include "invbranch/dyadic_tree.hpp"
#include "invbranch/errors.hpp"
#include "invbranch/lifting.hpp"
#include "invbranch/poisson.hpp"
#include "invbranch/svg.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace invbranch {

using nlohmann::json;

namespace {

constexpr const char* kSchemaVersion = "1";

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        const double v = std::stod(trim(s), &used);
        if (used != trim(s).size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw error(errc::parse_error, "bad number for " + what + ": '" + s + "'");
    }
}

int to_int(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        const int v = std::stoi(trim(s), &used);
        if (used != trim(s).size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw error(errc::parse_error, "bad integer for " + what + ": '" + s + "'");
    }
}

cplx to_complex(const std::string& s, const std::string& what) {
    const auto parts = split(s, ',');
    if (parts.size() == 1) return {to_double(parts[0], what), 0.0};
    if (parts.size() == 2) return {to_double(parts[0], what), to_double(parts[1], what)};
    throw error(errc::parse_error, "bad complex value for " + what + ": '" + s + "'");
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error(errc::precondition, "cannot open output path " + tmp);
        out.write(content.data(), (std::streamsize)content.size());
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw error(errc::precondition, "cannot move output into place at " + path);
}

// Timestamps are kept out of the payloads so reports stay byte-deterministic;
// they go into a sidecar log next to the primary output.
void write_sidecar_log(const std::string& path, const RunConfig& config) {
    if (path.empty()) return;
    std::ofstream log(path + ".log", std::ios::app);
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    log << stamp << " command=" << config.command << "\n";
}

void write_json_report(const RunConfig& config, json& report) {
    if (config.out_json.empty()) return;
    report["schema_version"] = kSchemaVersion;
    write_file_atomic(config.out_json, report.dump(2) + "\n");
    write_sidecar_log(config.out_json, config);
}

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

double parse_epsilon(const std::string& text) {
    const auto parts = split(trim(text), '/');
    double num = 0.0, den = 1.0;
    if (parts.size() == 1) {
        num = to_double(parts[0], "epsilon");
    } else if (parts.size() == 2) {
        num = to_double(parts[0], "epsilon");
        den = to_double(parts[1], "epsilon");
    } else {
        throw error(errc::parse_error, "epsilon must be rational p/q, got '" + text + "'");
    }
    if (!(den != 0.0)) throw error(errc::parse_error, "epsilon denominator is zero");
    const double eps = num / den;
    if (!(eps > 0.0) || !(eps <= 0.125))
        throw error(errc::parse_error, "epsilon " + text + " outside (0, 1/8]");
    return eps;
}

EntireFunctionSpec function_from_config(const RunConfig& config) {
    const std::string f = trim(config.function);
    if (f == "exp") return EntireFunctionSpec::exp_fn();
    if (f == "sinc") return EntireFunctionSpec::sinc();
    if (f == "tower" || f == "dyadic-tower") return EntireFunctionSpec::dyadic_tower();
    if (f.rfind("poly:", 0) == 0) {
        std::vector<cplx> coeff;
        for (const std::string& c : split(f.substr(5), ';'))
            coeff.push_back(to_complex(c, "polynomial coefficient"));
        return EntireFunctionSpec::polynomial(std::move(coeff));
    }
    throw error(errc::parse_error, "unknown function '" + f + "'");
}

namespace {

Polyline curve_from_config(const RunConfig& config) {
    const std::string c = trim(config.curve);
    if (c.rfind("circle:", 0) == 0) {
        const auto p = split(c.substr(7), ',');
        if (p.size() != 4 && p.size() != 5)
            throw error(errc::parse_error, "circle needs cx,cy,r,n[,start]");
        return Polyline::circle({to_double(p[0], "circle"), to_double(p[1], "circle")},
                                to_double(p[2], "circle"), to_int(p[3], "circle"),
                                p.size() == 5 ? to_double(p[4], "circle") : 0.0);
    }
    if (c.rfind("segment:", 0) == 0) {
        const auto p = split(c.substr(8), ',');
        if (p.size() != 4) throw error(errc::parse_error, "segment needs x0,y0,x1,y1");
        return Polyline::segment({to_double(p[0], "segment"), to_double(p[1], "segment")},
                                 {to_double(p[2], "segment"), to_double(p[3], "segment")});
    }
    if (c.rfind("points:", 0) == 0) {
        auto items = split(c.substr(7), ';');
        bool closed = false;
        if (!items.empty() && trim(items.back()) == "closed") {
            closed = true;
            items.pop_back();
        }
        std::vector<cplx> v;
        for (const std::string& it : items) v.push_back(to_complex(it, "curve point"));
        return closed ? Polyline::closed_path(std::move(v)) : Polyline::open_path(std::move(v));
    }
    throw error(errc::parse_error, "unknown curve spec '" + c + "'");
}

std::vector<LevelRadius> levels_from_config(const RunConfig& config,
                                            const EntireFunctionSpec& spec) {
    std::vector<LevelRadius> out;
    if (config.radii.empty()) {
        if (spec.kind == FunctionKind::DyadicTower)
            return {LevelRadius::log(-10.0), LevelRadius::log(-300.0), LevelRadius::log(-1e5)};
        return {LevelRadius::linear(0.5), LevelRadius::linear(0.1), LevelRadius::linear(0.02)};
    }
    for (const std::string& tok : config.radii) {
        const std::string t = trim(tok);
        if (t.rfind("log:", 0) == 0)
            out.push_back(LevelRadius::log(parse_signed_log(t).value()));
        else
            out.push_back(LevelRadius::linear(to_double(t, "radius")));
    }
    return out;
}

SingularMeasureSpec measure_from_config(const RunConfig& config) {
    const std::string m = trim(config.measure);
    if (m.rfind("cantor:", 0) == 0) {
        const auto p = split(m.substr(7), ':');
        if (p.size() != 4) throw error(errc::parse_error, "cantor needs depth:a:b:mass");
        return SingularMeasureSpec::cantor_like(to_int(p[0], "cantor"), to_double(p[1], "cantor"),
                                                to_double(p[2], "cantor"), to_double(p[3], "cantor"));
    }
    std::vector<SingularMeasureSpec::Atom> atoms;
    for (const std::string& tok : split(m, '+')) {
        const std::string t = trim(tok);
        if (t.rfind("atom:", 0) != 0)
            throw error(errc::parse_error, "unknown measure term '" + t + "'");
        const auto p = split(t.substr(5), ':');
        if (p.size() != 2) throw error(errc::parse_error, "atom needs theta:mass");
        atoms.push_back({to_double(p[0], "atom"), to_double(p[1], "atom")});
    }
    return SingularMeasureSpec::atoms(std::move(atoms));
}

std::vector<double> ladder_from_config(const RunConfig& config) {
    const std::string l = trim(config.ladder);
    std::vector<double> out;
    if (l.rfind("geometric:", 0) == 0) {
        const int k_max = to_int(l.substr(10), "ladder");
        if (k_max < 1 || k_max > 50) throw error(errc::parse_error, "geometric ladder k out of range");
        for (int k = 1; k <= k_max; ++k) out.push_back(1.0 - std::ldexp(1.0, -k));
        return out;
    }
    for (const std::string& tok : split(l, ',')) out.push_back(to_double(tok, "ladder radius"));
    return out;
}

Window window_from_config(const RunConfig& config) {
    Window w{{config.window_cx, config.window_cy}, config.half_width, config.half_height,
             config.resolution};
    w.validate();
    return w;
}

json component_json(const SublevelComponent& c) {
    json a = json::array();
    for (const cplx& p : c.a_points) a.push_back(cplx_json(p));
    return json{{"id", c.id},
                {"sample_point", cplx_json(c.sample_point)},
                {"cell_count", c.cell_count},
                {"touches_window_boundary", c.touches_window_boundary},
                {"a_points", a}};
}

void write_cells_csv(const RunConfig& config, const ComponentLadder& ladder) {
    if (config.out_csv.empty()) return;
    std::string csv = "rung,component,cell_re,cell_im\n";
    const int nx = ladder.window.nx();
    for (const auto& node : ladder.nodes) {
        for (int32_t cell : node.component.cells) {
            const cplx c = ladder.window.cell_center(cell % nx, cell / nx);
            csv += std::to_string(node.radius_index) + "," + std::to_string(node.component.id) +
                   "," + csv_num(c.real()) + "," + csv_num(c.imag()) + "\n";
        }
    }
    write_file_atomic(config.out_csv, csv);
}

// ---- commands ----------------------------------------------------------

int cmd_verify_example(const RunConfig& config) {
    const double eps = parse_epsilon(config.epsilon);
    const int lo = config.level_lo, hi = config.level_hi;

    InequalityReport ineq = verify_inequalities(eps, lo, hi, config.samples_per_set);

    json mono_json = json::array(), arcs_json = json::array();
    bool mono_ok = true, arcs_ok = true, bound_ok = true;
    for (int n = lo; n <= hi; ++n) {
        const double mid = 0.5 * (annulus_inner(n, eps) + annulus_outer(n, eps));
        const int nt_mono = std::max(config.n_theta, (int)std::ldexp(1.0, n + 3));
        MonotonicityReport mono = verify_arg_monotonic(eps, n, mid, nt_mono);
        mono_ok = mono_ok && mono.min_re > 0.0;
        if (n >= 8) bound_ok = bound_ok && mono.bound_holds;
        mono_json.push_back(json{{"level", n},
                                 {"radius", mid},
                                 {"n_theta", nt_mono},
                                 {"min_re", mono.min_re},
                                 {"max_abs_deviation", mono.max_abs_deviation},
                                 {"bound_holds", mono.bound_holds},
                                 {"total_arg_increase", mono.total_arg_increase},
                                 {"expected_arg_increase", std::ldexp(1.0, n) * 2.0 * M_PI},
                                 {"degenerate_points", mono.degenerate_points}});

        const SignedLogReal thr = config.arc_threshold.empty()
                                      ? two_pow_two_pow(n, -1)
                                      : parse_signed_log(config.arc_threshold);
        const int nt_arcs = std::max(config.n_theta, (int)std::ldexp(1.0, n + 5));
        ArcCountReport arcs = count_sublevel_arcs(eps, n, mid, thr, nt_arcs);
        arcs_ok = arcs_ok && arcs.arc_count == (int)std::ldexp(1.0, n) && arcs.midpoints_covered;
        arcs_json.push_back(json{{"level", n},
                                 {"radius", mid},
                                 {"threshold", format_signed_log(thr)},
                                 {"n_theta", nt_arcs},
                                 {"arc_count", arcs.arc_count},
                                 {"expected_arcs", (int)std::ldexp(1.0, n)},
                                 {"midpoints_covered", arcs.midpoints_covered},
                                 {"ray_angles_excluded", arcs.ray_angles_excluded},
                                 {"covers_entire_circle", arcs.covers_entire_circle},
                                 {"min_arc_samples", arcs.min_arc_samples}});
    }

    json sets = json::array();
    for (const SetCheck& s : ineq.sets)
        sets.push_back(json{{"kind", tree_set_kind_name(s.kind)},
                            {"n", s.level},
                            {"j", s.j},
                            {"samples", s.samples},
                            {"pass", s.pass},
                            {"min_log_margin", s.min_log_margin},
                            {"degenerate_resampled", s.degenerate_resampled}});

    const bool pass = ineq.all_pass && ineq.margins_increase && mono_ok && arcs_ok && bound_ok;
    json report{{"command", "verify-example"},
                {"epsilon", config.epsilon},
                {"levels", json::array({lo, hi})},
                {"samples_per_set", config.samples_per_set},
                {"inequalities",
                 json{{"all_pass", ineq.all_pass},
                      {"margins_increase", ineq.margins_increase},
                      {"min_margin_per_level", ineq.min_margin_per_level},
                      {"degenerate_failures", ineq.degenerate_failures},
                      {"sets", sets}}},
                {"monotonicity", mono_json},
                {"arc_counts", arcs_json},
                {"pass", pass}};
    write_json_report(config, report);

    if (!config.out_csv.empty()) {
        std::string csv = "kind,n,j,sample,re,im,sign,log_abs\n";
        for (int n = lo; n <= hi; ++n) {
            for (int j = 0; j < (int)std::ldexp(1.0, n); ++j) {
                for (TreeSetKind kind : {TreeSetKind::Ray, TreeSetKind::Spoke, TreeSetKind::ArcPlus,
                                         TreeSetKind::ArcMinus}) {
                    const TreeSet set = make_tree_set(kind, n, j, eps);
                    for (int i = 0; i < config.samples_per_set; ++i) {
                        const double r = set.r_start + (set.r_end - set.r_start) * i /
                                                           (config.samples_per_set - 1);
                        const cplx z = set.point_at(r);
                        auto slr = signed_log_re_g(z);
                        csv += std::string(tree_set_kind_name(kind)) + "," + std::to_string(n) +
                               "," + std::to_string(j) + "," + std::to_string(i) + "," +
                               csv_num(z.real()) + "," + csv_num(z.imag()) + "," +
                               (slr ? std::to_string(slr->sign) : "degenerate") + "," +
                               (slr ? csv_num(slr->log_abs) : "") + "\n";
                    }
                }
            }
        }
        write_file_atomic(config.out_csv, csv);
    }
    return pass ? 0 : 1;
}

int cmd_render_tree(const RunConfig& config) {
    const double eps = parse_epsilon(config.epsilon);
    const Window window = window_from_config(config);
    const TreeGraph tree = build_tree(eps, suggested_n_max(eps, window), window);
    const SvgStyle style = SvgStyle::versioned(config.style_version);
    const std::string svg = render_svg(tree, window, style);
    if (config.out_svg.empty()) throw error(errc::parse_error, "render-tree needs out.svg");
    write_file_atomic(config.out_svg, svg);
    write_sidecar_log(config.out_svg, config);

    json counts = json::array();
    const auto visible = tree.visible_spoke_counts();
    for (size_t i = 0; i < visible.size(); ++i)
        counts.push_back(json{{"level", (int)i + 1}, {"fully_visible_spokes", visible[i]}});
    json report{{"command", "render-tree"},
                {"epsilon", config.epsilon},
                {"n_max", tree.n_max},
                {"style_version", style.version},
                {"spoke_counts", counts}};
    write_json_report(config, report);
    return 0;
}

int cmd_classify(const RunConfig& config) {
    const EntireFunctionSpec spec = function_from_config(config);
    const Window window = window_from_config(config);
    const cplx a{config.a_re, config.a_im};
    const auto radii = levels_from_config(config, spec);

    ComponentLadder ladder = component_ladder(spec, a, radii, window, config.threads);

    // deepest chain over all roots; ties to the earliest root
    std::vector<int> chain;
    for (int root : ladder.roots()) {
        auto c = ladder.deepest_chain(root);
        if (c.size() > chain.size()) chain = std::move(c);
    }
    if (chain.empty()) throw error(errc::no_seeds, "no components found at the largest radius");
    SingularityReport rep = classify_singularity(ladder, chain);

    json nodes = json::array();
    for (size_t i = 0; i < ladder.nodes.size(); ++i) {
        const auto& n = ladder.nodes[i];
        json nj = component_json(n.component);
        nj["node"] = (int)i;
        nj["rung"] = n.radius_index;
        nj["parent"] = n.parent;
        nj["children"] = n.children;
        nodes.push_back(nj);
    }
    json levels = json::array();
    for (const LevelRadius& r : radii)
        levels.push_back(json{{"value", r.value}, {"log_domain", r.is_log}});
    json report{{"command", "classify"},
                {"function", spec.name()},
                {"a", cplx_json(a)},
                {"radii", levels},
                {"classification", singularity_class_name(rep.classification)},
                {"splitting_detected", rep.splitting_detected},
                {"witness", rep.witness},
                {"chain", chain},
                {"nodes", nodes}};
    write_json_report(config, report);
    write_cells_csv(config, ladder);
    return rep.classification == SingularityClass::Inconclusive ? 1 : 0;
}

int cmd_check_disconnected(const RunConfig& config) {
    const EntireFunctionSpec spec = function_from_config(config);
    const Window window = window_from_config(config);
    DisconnectednessResult res =
        disconnectedness_check(spec, {config.a_re, config.a_im},
                               {config.disc_re, config.disc_im}, config.disc_radius, window,
                               config.threads);
    json comps = json::array();
    for (const auto& c : res.components) comps.push_back(component_json(c));
    const bool witnessed = res.verdict == DisconnectednessVerdict::DisconnectedWitnessed;
    json report{{"command", "check-disconnected"},
                {"function", spec.name()},
                {"a", cplx_json({config.a_re, config.a_im})},
                {"disc_center", cplx_json({config.disc_re, config.disc_im})},
                {"disc_radius", config.disc_radius},
                {"component_count", res.component_count},
                {"verdict", witnessed ? "disconnected (witnessed)" : "inconclusive"},
                {"components", comps}};
    write_json_report(config, report);
    return witnessed ? 0 : 1;
}

int cmd_lift(const RunConfig& config) {
    const EntireFunctionSpec spec = function_from_config(config);
    if (!config.seed_set) throw error(errc::parse_error, "lift needs a seed");
    const Polyline curve = curve_from_config(config);
    const cplx seed{config.seed_re, config.seed_im};
    const LiftResult r =
        config.perturb_epsilon > 0.0
            ? perturbed_lift(spec, curve, seed, config.perturb_epsilon, config.max_retries,
                             config.window_radius, config.tol_track)
            : lift_curve(spec, curve, seed, config.window_radius, config.tol_track);

    json path = json::array();
    for (const auto& [t, z] : r.path) path.push_back(json::array({t, z.real(), z.imag()}));
    json report{{"command", "lift"},
                {"function", spec.name()},
                {"status", lift_status_name(r.status)},
                {"terminal_parameter", r.terminal_parameter},
                {"endpoint", cplx_json(r.end())},
                {"nodes", (int)r.path.size()},
                {"path", path}};
    write_json_report(config, report);
    if (!config.out_csv.empty()) {
        std::string csv = "t,re,im\n";
        for (const auto& [t, z] : r.path)
            csv += csv_num(t) + "," + csv_num(z.real()) + "," + csv_num(z.imag()) + "\n";
        write_file_atomic(config.out_csv, csv);
    }
    return r.status == LiftStatus::Completed ? 0 : 1;
}

int cmd_sweep(const RunConfig& config) {
    const EntireFunctionSpec spec = function_from_config(config);
    if (!config.seed_set) throw error(errc::parse_error, "sweep needs a seed");
    SweepReport rep =
        line_sweep(spec, {config.disc_re, config.disc_im}, config.disc_radius,
                   {config.seed_re, config.seed_im}, config.direction, config.n_lines,
                   config.max_length, config.window_radius, config.tol_track);
    json endpoints = json::array();
    for (const cplx& w : rep.singular_endpoints) endpoints.push_back(cplx_json(w));
    json statuses = json::array();
    for (LiftStatus s : rep.line_status) statuses.push_back(lift_status_name(s));
    json report{{"command", "sweep"},
                {"function", spec.name()},
                {"n_lines", rep.n_lines},
                {"failed_line_indices", rep.failed_line_indices},
                {"singular_endpoints", endpoints},
                {"exceptional_fraction", rep.exceptional_fraction},
                {"line_status", statuses}};
    write_json_report(config, report);
    return 0;
}

int cmd_poisson(const RunConfig& config) {
    const SingularMeasureSpec measure = measure_from_config(config);
    const auto ladder = ladder_from_config(config);
    DivergenceScan scan = divergence_scan(measure, config.arc_a, config.arc_b, ladder);

    if (!config.out_csv.empty()) {
        std::string csv = "r,theta,u\n";
        for (size_t i = 0; i < scan.radii.size(); ++i)
            csv += csv_num(scan.radii[i]) + "," + csv_num(scan.theta_star) + "," +
                   csv_num(scan.values[i]) + "\n";
        write_file_atomic(config.out_csv, csv);
        write_sidecar_log(config.out_csv, config);
    }
    json bounds = json::array();
    for (uint8_t b : scan.lower_bound_ok) bounds.push_back(b != 0);
    json report{{"command", "poisson"},
                {"theta_star", scan.theta_star},
                {"radii", scan.radii},
                {"values", scan.values},
                {"lower_bound_ok", bounds},
                {"all_bounds_hold", scan.all_bounds_hold}};
    write_json_report(config, report);
    return scan.all_bounds_hold ? 0 : 1;
}

} // namespace

void parse_config_into(const std::string& text, RunConfig& config) {
    int line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line_no++;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw error(errc::parse_error,
                        "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "command") config.command = val;
        else if (key == "function") config.function = val;
        else if (key == "a") { const cplx z = to_complex(val, key); config.a_re = z.real(); config.a_im = z.imag(); }
        else if (key == "window.center") { const cplx z = to_complex(val, key); config.window_cx = z.real(); config.window_cy = z.imag(); }
        else if (key == "window.half_width") config.half_width = to_double(val, key);
        else if (key == "window.half_height") config.half_height = to_double(val, key);
        else if (key == "window.resolution") config.resolution = to_double(val, key);
        else if (key == "epsilon") config.epsilon = val;
        else if (key == "levels") {
            const auto parts = split(val, '.');
            // "lo..hi" or a single level
            if (parts.size() == 3 && parts[1].empty()) {
                config.level_lo = to_int(parts[0], key);
                config.level_hi = to_int(parts[2], key);
            } else if (parts.size() == 1) {
                config.level_lo = config.level_hi = to_int(parts[0], key);
            } else {
                throw error(errc::parse_error, "levels must be 'lo..hi' or a single integer");
            }
        }
        else if (key == "radii") { config.radii.clear(); for (const auto& t : split(val, ',')) config.radii.push_back(trim(t)); }
        else if (key == "arc_threshold") config.arc_threshold = val;
        else if (key == "samples_per_set") config.samples_per_set = to_int(val, key);
        else if (key == "n_theta") config.n_theta = to_int(val, key);
        else if (key == "n_lines") config.n_lines = to_int(val, key);
        else if (key == "n_seeds") config.n_seeds = to_int(val, key);
        else if (key == "disc.center") { const cplx z = to_complex(val, key); config.disc_re = z.real(); config.disc_im = z.imag(); }
        else if (key == "disc.radius") config.disc_radius = to_double(val, key);
        else if (key == "seed") { const cplx z = to_complex(val, key); config.seed_re = z.real(); config.seed_im = z.imag(); config.seed_set = true; }
        else if (key == "direction") config.direction = to_double(val, key);
        else if (key == "max_length") config.max_length = to_double(val, key);
        else if (key == "window_radius") config.window_radius = to_double(val, key);
        else if (key == "tol_track") config.tol_track = to_double(val, key);
        else if (key == "perturb.epsilon") config.perturb_epsilon = to_double(val, key);
        else if (key == "perturb.max_retries") config.max_retries = to_int(val, key);
        else if (key == "curve") config.curve = val;
        else if (key == "measure") config.measure = val;
        else if (key == "arc.a") config.arc_a = to_double(val, key);
        else if (key == "arc.b") config.arc_b = to_double(val, key);
        else if (key == "ladder") config.ladder = val;
        else if (key == "out.json") config.out_json = val;
        else if (key == "out.csv") config.out_csv = val;
        else if (key == "out.svg") config.out_svg = val;
        else if (key == "style_version") config.style_version = to_int(val, key);
        else if (key == "threads") config.threads = to_int(val, key);
        else throw error(errc::parse_error, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    parse_config_into(text, config);
    validate_config(config);
    return config;
}

void validate_config(const RunConfig& config) {
    parse_epsilon(config.epsilon); // range-checked
    std::set<std::string> outs;
    for (const std::string& p : {config.out_json, config.out_csv, config.out_svg}) {
        if (p.empty()) continue;
        if (!outs.insert(p).second)
            throw error(errc::parse_error, "output paths must be distinct: '" + p + "'");
    }
    if (config.level_lo < 1 || config.level_hi < config.level_lo)
        throw error(errc::parse_error, "bad level range");
    if (config.samples_per_set < 16)
        throw error(errc::parse_error, "samples_per_set must be >= 16");
}

int run_command(const RunConfig& config) {
    try {
        validate_config(config);
        const std::string& c = config.command;
        if (c == "verify-example") return cmd_verify_example(config);
        if (c == "render-tree") return cmd_render_tree(config);
        if (c == "classify") return cmd_classify(config);
        if (c == "check-disconnected") return cmd_check_disconnected(config);
        if (c == "lift") return cmd_lift(config);
        if (c == "sweep") return cmd_sweep(config);
        if (c == "poisson") return cmd_poisson(config);
        throw error(errc::parse_error, "unknown command '" + c + "'");
    } catch (const error& e) {
        // Failure paths still produce a machine-readable report.
        if (!config.out_json.empty()) {
            try {
                json report{{"command", config.command},
                            {"error", {{"code", errc_name(e.code())}, {"message", e.what()}}}};
                report["schema_version"] = kSchemaVersion;
                write_file_atomic(config.out_json, report.dump(2) + "\n");
            } catch (...) {
            }
        }
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.code()) {
            case errc::parse_error:
            case errc::precondition:
            case errc::epsilon_range:
            case errc::on_curve:
            case errc::not_closed:
            case errc::zero_mass:
                return 2;
            default:
                return 3;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

} // namespace invbranch
