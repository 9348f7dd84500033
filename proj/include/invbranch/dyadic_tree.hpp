#pragma once

#include <string>
#include <vector>

#include "invbranch/components.hpp"
#include "invbranch/functions.hpp"

namespace invbranch {

/// Radial band of tree level n: spokes live in [r_inner, r_outer] with
/// r_inner = (1+eps) 2^(n+1) and r_outer = (1-2 eps) 2^(n+2).
struct LevelGeometry {
    int level = 1;
    double epsilon = 1.0 / 16.0;
    double r_inner = 0.0;
    double r_outer = 0.0;
};

/// Requires eps in (0, 1/8]; then r_inner < r_outer < next level's r_inner.
LevelGeometry level_geometry(int level, double epsilon);

/// Annulus on which arg g is monotone along circles: [(1+2eps) 2^(n+1), (1-3eps) 2^(n+2)].
double annulus_inner(int level, double epsilon);
double annulus_outer(int level, double epsilon);

enum class TreeSetKind { Ray, Spoke, ArcPlus, ArcMinus };

const char* tree_set_kind_name(TreeSetKind k);

/// One drawable/sampleable set of the dyadic tree:
///  Ray      angle 2 pi j / 2^n,          r >= r_inner (truncated at r_end)
///  Spoke    angle (pi + 2 pi j) / 2^n,   r in [r_inner, r_outer]
///  Arc+/-   angle interpolating from the level-n spoke to the level-(n+1)
///           spoke at 2j+1 / 2j, r in [r_outer, next r_inner]
struct TreeSet {
    TreeSetKind kind = TreeSetKind::Spoke;
    int level = 1;
    int j = 0;
    double epsilon = 1.0 / 16.0;
    double r_start = 0.0;
    double r_end = 0.0;

    double angle_at(double r) const;
    cplx point_at(double r) const;
    std::vector<cplx> sample(int points) const;
};

TreeSet make_tree_set(TreeSetKind kind, int level, int j, double epsilon);

/// The infinite binary tree truncated at n_max, with window metadata for
/// clipping and rendering.  Spokes are the nodes; every spoke below n_max has
/// exactly two children reached through an arc pair.
struct TreeGraph {
    double epsilon = 1.0 / 16.0;
    int n_max = 1;
    Window window;
    std::pair<cplx, cplx> root_segment; // [-i r_1, +i r_1]
    std::vector<TreeSet> spokes;
    std::vector<TreeSet> arcs;
    std::vector<TreeSet> rays;

    struct Edge {
        int arc = 0;          // index into arcs
        int parent_spoke = 0; // index into spokes
        int child_spoke = 0;
    };
    std::vector<Edge> edges;

    int spoke_index(int level, int j) const;
    bool endpoint_visible(const TreeSet& set) const; // both endpoints in the window
    /// Fully visible spokes per level (index 0 = level 1).
    std::vector<int> visible_spoke_counts() const;
};

TreeGraph build_tree(double epsilon, int n_max, const Window& window);

/// Pick n_max so that every level whose sets can enter the window is present.
int suggested_n_max(double epsilon, const Window& window);

struct SetCheck {
    TreeSetKind kind;
    int level = 0;
    int j = 0;
    int samples = 0;
    bool pass = false;
    double min_log_margin = 0.0; // min over samples of log|Re g| - 2^n ln 2
    int degenerate_resampled = 0;
};

struct InequalityReport {
    double epsilon = 0.0;
    int level_lo = 0, level_hi = 0;
    int samples_per_set = 0;
    std::vector<SetCheck> sets;
    std::vector<double> min_margin_per_level; // indexed level_lo..level_hi
    bool all_pass = false;
    bool margins_increase = false;
    int degenerate_failures = 0;
};

/// Check Re g > 2^(2^n) on rays and Re g < -2^(2^n) on spokes and arcs, in the
/// signed-log domain.  Rays are sampled on [r_n, r_(n+2)].  Degenerate samples
/// are re-tried once at radius * (1 + 1e-3) before counting as failures.
InequalityReport verify_inequalities(double epsilon, int level_lo, int level_hi,
                                     int samples_per_set);

struct MonotonicityReport {
    int level = 0;
    double epsilon = 0.0;
    double radius = 0.0;
    int n_theta = 0;
    double min_re = 0.0;             // min over theta of Re(z g'/g)
    double max_abs_deviation = 0.0;  // max over theta of |z g'/g - 2^n|
    bool bound_holds = false;        // max_abs_deviation <= 1/2
    double total_arg_increase = 0.0; // integral of Re(z g'/g) d theta over a circuit
    int degenerate_points = 0;
};

/// Scan z g'/g on the circle |z| = radius inside the level-n annulus.
/// Requires n_theta >= 2^(n+3).
MonotonicityReport verify_arg_monotonic(double epsilon, int level, double radius, int n_theta);

struct ArcCountReport {
    int level = 0;
    double radius = 0.0;
    SignedLogReal threshold;
    int n_theta = 0;
    int arc_count = 0;
    bool midpoints_covered = false;    // each arc holds exactly one spoke angle
    bool ray_angles_excluded = false;  // no arc holds a ray angle
    bool covers_entire_circle = false; // degenerate control case
    int min_arc_samples = 0;
};

/// Count maximal circular arcs where Re g < log_rho on |z| = radius (annulus
/// radius, threshold >= -2^(2^n) in the signed-log domain, n_theta >= 2^(n+5)).
/// Throws UNDERSAMPLED when an arc spans fewer than 4 samples.
ArcCountReport count_sublevel_arcs(double epsilon, int level, double radius,
                                   SignedLogReal log_rho, int n_theta);

} // namespace invbranch
