#include "invbranch/dyadic_tree.hpp"
#include "invbranch/errors.hpp"

#include <algorithm>
#include <cmath>

namespace invbranch {

namespace {

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon <= 0.125))
        throw error(errc::epsilon_range, "epsilon must lie in (0, 1/8]");
}

double pow2(int e) { return std::ldexp(1.0, e); }

} // namespace

LevelGeometry level_geometry(int level, double epsilon) {
    check_epsilon(epsilon);
    if (level < 1) throw error(errc::precondition, "level must be >= 1");
    LevelGeometry g;
    g.level = level;
    g.epsilon = epsilon;
    g.r_inner = (1.0 + epsilon) * pow2(level + 1);
    g.r_outer = (1.0 - 2.0 * epsilon) * pow2(level + 2);
    return g;
}

double annulus_inner(int level, double epsilon) { return (1.0 + 2.0 * epsilon) * pow2(level + 1); }
double annulus_outer(int level, double epsilon) { return (1.0 - 3.0 * epsilon) * pow2(level + 2); }

const char* tree_set_kind_name(TreeSetKind k) {
    switch (k) {
        case TreeSetKind::Ray: return "ray";
        case TreeSetKind::Spoke: return "spoke";
        case TreeSetKind::ArcPlus: return "arc_plus";
        case TreeSetKind::ArcMinus: return "arc_minus";
    }
    return "?";
}

double TreeSet::angle_at(double r) const {
    const double base = 2.0 * M_PI * j / pow2(level);
    switch (kind) {
        case TreeSetKind::Ray: return base;
        case TreeSetKind::Spoke: return base + M_PI / pow2(level);
        case TreeSetKind::ArcPlus:
        case TreeSetKind::ArcMinus: {
            const double sgn = (kind == TreeSetKind::ArcPlus) ? +1.0 : -1.0;
            const double s = (r - r_start) / (r_end - r_start);
            return base + M_PI / pow2(level) + sgn * s * M_PI / pow2(level + 1);
        }
    }
    return base;
}

cplx TreeSet::point_at(double r) const { return std::polar(r, angle_at(r)); }

std::vector<cplx> TreeSet::sample(int points) const {
    if (points < 2) points = 2;
    std::vector<cplx> out;
    out.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double r = r_start + (r_end - r_start) * i / (points - 1);
        out.push_back(point_at(r));
    }
    return out;
}

TreeSet make_tree_set(TreeSetKind kind, int level, int j, double epsilon) {
    check_epsilon(epsilon);
    if (level < 1) throw error(errc::precondition, "level must be >= 1");
    if (j < 0 || j >= (int)pow2(level)) throw error(errc::precondition, "index j out of range");
    const LevelGeometry g = level_geometry(level, epsilon);
    TreeSet s;
    s.kind = kind;
    s.level = level;
    s.j = j;
    s.epsilon = epsilon;
    switch (kind) {
        case TreeSetKind::Ray:
            s.r_start = g.r_inner;
            s.r_end = level_geometry(level + 2, epsilon).r_inner; // sampling truncation
            break;
        case TreeSetKind::Spoke:
            s.r_start = g.r_inner;
            s.r_end = g.r_outer;
            break;
        case TreeSetKind::ArcPlus:
        case TreeSetKind::ArcMinus:
            s.r_start = g.r_outer;
            s.r_end = level_geometry(level + 1, epsilon).r_inner;
            break;
    }
    return s;
}

int TreeGraph::spoke_index(int level, int j) const {
    // spokes are stored level-major: levels 1..n_max, j ascending
    if (level < 1 || level > n_max || j < 0 || j >= (int)pow2(level)) return -1;
    int base = 0;
    for (int n = 1; n < level; ++n) base += (int)pow2(n);
    return base + j;
}

bool TreeGraph::endpoint_visible(const TreeSet& set) const {
    return window.contains(set.point_at(set.r_start)) && window.contains(set.point_at(set.r_end));
}

std::vector<int> TreeGraph::visible_spoke_counts() const {
    std::vector<int> counts(n_max, 0);
    for (const TreeSet& s : spokes)
        if (endpoint_visible(s)) counts[s.level - 1]++;
    return counts;
}

TreeGraph build_tree(double epsilon, int n_max, const Window& window) {
    check_epsilon(epsilon);
    if (n_max < 1) throw error(errc::precondition, "n_max must be >= 1");

    TreeGraph t;
    t.epsilon = epsilon;
    t.n_max = n_max;
    t.window = window;
    const double r1 = level_geometry(1, epsilon).r_inner;
    t.root_segment = {cplx(0.0, -r1), cplx(0.0, r1)};

    for (int n = 1; n <= n_max; ++n) {
        for (int j = 0; j < (int)pow2(n); ++j) {
            t.spokes.push_back(make_tree_set(TreeSetKind::Spoke, n, j, epsilon));
            t.rays.push_back(make_tree_set(TreeSetKind::Ray, n, j, epsilon));
        }
    }
    for (int n = 1; n <= n_max; ++n) {
        for (int j = 0; j < (int)pow2(n); ++j) {
            for (TreeSetKind k : {TreeSetKind::ArcMinus, TreeSetKind::ArcPlus}) {
                t.arcs.push_back(make_tree_set(k, n, j, epsilon));
                if (n + 1 <= n_max) {
                    TreeGraph::Edge e;
                    e.arc = (int)t.arcs.size() - 1;
                    e.parent_spoke = t.spoke_index(n, j);
                    e.child_spoke =
                        t.spoke_index(n + 1, k == TreeSetKind::ArcMinus ? 2 * j : 2 * j + 1);
                    t.edges.push_back(e);
                }
            }
        }
    }
    return t;
}

int suggested_n_max(double epsilon, const Window& window) {
    check_epsilon(epsilon);
    const double cx = window.center.real(), cy = window.center.imag();
    double corner = 0.0;
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0})
            corner = std::max(corner, std::abs(cplx(cx + sx * window.half_width,
                                                    cy + sy * window.half_height)));
    int n = 1;
    while (level_geometry(n + 1, epsilon).r_inner <= corner) ++n;
    return n;
}

namespace {

// One inequality sample: rays need Re g > 2^(2^n), the rest Re g < -2^(2^n).
// Returns the log margin (log|Re g| - 2^n ln 2 when the sign matches, else a
// failed sample), re-trying once at a nudged radius on degeneracy.
struct SampleOutcome {
    bool pass = false;
    bool degenerate = false;
    double margin = 0.0;
};

SampleOutcome check_sample(const TreeSet& set, double r, int want_sign, double threshold_log) {
    SampleOutcome out;
    auto slr = signed_log_re_g(set.point_at(r));
    if (!slr) {
        out.degenerate = true;
        slr = signed_log_re_g(set.point_at(r * (1.0 + 1e-3)));
        if (!slr) return out; // counted as a failure
    }
    if (slr->sign != want_sign) return out;
    out.margin = slr->log_abs - threshold_log;
    out.pass = out.margin > 0.0;
    return out;
}

} // namespace

InequalityReport verify_inequalities(double epsilon, int level_lo, int level_hi,
                                     int samples_per_set) {
    check_epsilon(epsilon);
    if (level_lo < 1 || level_hi < level_lo)
        throw error(errc::precondition, "bad level range");
    if (samples_per_set < 16) throw error(errc::precondition, "samples_per_set must be >= 16");

    InequalityReport rep;
    rep.epsilon = epsilon;
    rep.level_lo = level_lo;
    rep.level_hi = level_hi;
    rep.samples_per_set = samples_per_set;
    rep.all_pass = true;

    for (int n = level_lo; n <= level_hi; ++n) {
        const double threshold_log = pow2(n) * M_LN2; // log of 2^(2^n)
        double level_min = std::numeric_limits<double>::infinity();
        for (int j = 0; j < (int)pow2(n); ++j) {
            for (TreeSetKind kind : {TreeSetKind::Ray, TreeSetKind::Spoke, TreeSetKind::ArcPlus,
                                     TreeSetKind::ArcMinus}) {
                const TreeSet set = make_tree_set(kind, n, j, epsilon);
                const int want = (kind == TreeSetKind::Ray) ? +1 : -1;
                SetCheck chk;
                chk.kind = kind;
                chk.level = n;
                chk.j = j;
                chk.samples = samples_per_set;
                chk.pass = true;
                chk.min_log_margin = std::numeric_limits<double>::infinity();
                for (int i = 0; i < samples_per_set; ++i) {
                    const double r =
                        set.r_start + (set.r_end - set.r_start) * i / (samples_per_set - 1);
                    const SampleOutcome s = check_sample(set, r, want, threshold_log);
                    if (s.degenerate) chk.degenerate_resampled++;
                    if (!s.pass) {
                        chk.pass = false;
                        if (s.degenerate) rep.degenerate_failures++;
                        continue;
                    }
                    chk.min_log_margin = std::min(chk.min_log_margin, s.margin);
                }
                rep.all_pass = rep.all_pass && chk.pass;
                if (chk.pass) level_min = std::min(level_min, chk.min_log_margin);
                rep.sets.push_back(chk);
            }
        }
        rep.min_margin_per_level.push_back(level_min);
    }

    rep.margins_increase = true;
    for (size_t i = 1; i < rep.min_margin_per_level.size(); ++i)
        if (!(rep.min_margin_per_level[i] > rep.min_margin_per_level[i - 1]))
            rep.margins_increase = false;
    return rep;
}

MonotonicityReport verify_arg_monotonic(double epsilon, int level, double radius, int n_theta) {
    check_epsilon(epsilon);
    const double lo = annulus_inner(level, epsilon), hi = annulus_outer(level, epsilon);
    if (!(radius >= lo && radius <= hi))
        throw error(errc::precondition, "radius outside the level annulus");
    if (n_theta < (int)pow2(level + 3))
        throw error(errc::precondition, "n_theta must be >= 2^(level+3)");

    MonotonicityReport rep;
    rep.level = level;
    rep.epsilon = epsilon;
    rep.radius = radius;
    rep.n_theta = n_theta;
    rep.min_re = std::numeric_limits<double>::infinity();
    const double target = pow2(level);

    double integral = 0.0;
    for (int i = 0; i < n_theta; ++i) {
        const double theta = 2.0 * M_PI * i / n_theta;
        auto q = zg_over_g(std::polar(radius, theta));
        if (!q) {
            rep.degenerate_points++;
            integral += target * (2.0 * M_PI / n_theta); // neutral filler
            continue;
        }
        rep.min_re = std::min(rep.min_re, q->real());
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(*q - target));
        integral += q->real() * (2.0 * M_PI / n_theta);
    }
    rep.total_arg_increase = integral;
    rep.bound_holds = rep.max_abs_deviation <= 0.5 && rep.degenerate_points == 0;
    return rep;
}

ArcCountReport count_sublevel_arcs(double epsilon, int level, double radius,
                                   SignedLogReal log_rho, int n_theta) {
    check_epsilon(epsilon);
    const double lo = annulus_inner(level, epsilon), hi = annulus_outer(level, epsilon);
    if (!(radius >= lo && radius <= hi))
        throw error(errc::precondition, "radius outside the level annulus");
    if (n_theta < (int)pow2(level + 5))
        throw error(errc::precondition, "n_theta must be >= 2^(level+5)");
    if (slr_less(log_rho, two_pow_two_pow(level, -1)))
        throw error(errc::precondition, "threshold must be >= -2^(2^n)");

    ArcCountReport rep;
    rep.level = level;
    rep.radius = radius;
    rep.threshold = log_rho;
    rep.n_theta = n_theta;

    std::vector<uint8_t> marked(n_theta, 0);
    for (int i = 0; i < n_theta; ++i) {
        const double theta = 2.0 * M_PI * i / n_theta;
        auto slr = signed_log_re_g(std::polar(radius, theta));
        if (!slr) slr = signed_log_re_g(std::polar(radius * (1.0 + 1e-3), theta));
        if (slr && slr_less(*slr, log_rho)) marked[i] = 1;
    }

    const int total_marked = (int)std::count(marked.begin(), marked.end(), (uint8_t)1);
    if (total_marked == n_theta) {
        rep.arc_count = 1;
        rep.covers_entire_circle = true;
        rep.min_arc_samples = n_theta;
        rep.midpoints_covered = false; // one arc holds every spoke angle
        rep.ray_angles_excluded = false;
        return rep;
    }
    if (total_marked == 0) {
        rep.arc_count = 0;
        rep.min_arc_samples = 0;
        return rep;
    }

    // Circular runs of marked samples.
    struct Arc {
        int first, last; // sample indices, inclusive; may wrap
        int span;
    };
    std::vector<Arc> arcs;
    int start = 0;
    while (marked[start]) start = (start + 1) % n_theta; // some unmarked sample exists
    for (int k = 0; k < n_theta; ++k) {
        const int i = (start + k) % n_theta;
        if (!marked[i]) continue;
        if (arcs.empty() || !marked[(i + n_theta - 1) % n_theta])
            arcs.push_back({i, i, 1});
        else {
            arcs.back().last = i;
            arcs.back().span++;
        }
    }
    rep.arc_count = (int)arcs.size();
    rep.min_arc_samples = n_theta;
    for (const Arc& a : arcs) rep.min_arc_samples = std::min(rep.min_arc_samples, a.span);
    if (rep.min_arc_samples < 4)
        throw error(errc::undersampled, "a sublevel arc spans fewer than 4 samples");

    const double dtheta = 2.0 * M_PI / n_theta;
    auto arc_contains = [&](const Arc& a, double phi) {
        // membership with half-sample slack on both ends
        const double lo_a = a.first * dtheta - 0.5 * dtheta;
        const double span = (a.span + 1) * dtheta;
        double d = std::fmod(phi - lo_a, 2.0 * M_PI);
        if (d < 0) d += 2.0 * M_PI;
        return d <= span;
    };

    rep.midpoints_covered = true;
    rep.ray_angles_excluded = true;
    for (const Arc& a : arcs) {
        int n_mid = 0, n_ray = 0;
        for (int j = 0; j < (int)pow2(level); ++j) {
            const double mid = (M_PI + 2.0 * M_PI * j) / pow2(level);
            const double ray = 2.0 * M_PI * j / pow2(level);
            if (arc_contains(a, mid)) n_mid++;
            if (arc_contains(a, ray)) n_ray++;
        }
        if (n_mid != 1) rep.midpoints_covered = false;
        if (n_ray != 0) rep.ray_angles_excluded = false;
    }
    return rep;
}

} // namespace invbranch
