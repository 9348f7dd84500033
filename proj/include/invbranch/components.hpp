#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "invbranch/functions.hpp"

namespace invbranch {

/// Axis-aligned evaluation window with a square cell grid.
struct Window {
    cplx center{0.0, 0.0};
    double half_width = 80.0;
    double half_height = 80.0;
    double resolution = 0.25;

    void validate() const;
    int nx() const;
    int ny() const;
    cplx cell_center(int ix, int iy) const;
    int cell_index(int ix, int iy) const { return iy * nx() + ix; }
    bool contains(cplx z) const;
    /// Cell containing z, or nullopt outside the window.
    std::optional<std::pair<int, int>> locate(cplx z) const;

    static Window square(double half, double resolution, cplx center = {0.0, 0.0}) {
        return {center, half, half, resolution};
    }
};

/// Target level |f - a| < r; for the dyadic tower the level is Re g < log_radius
/// (|f| = e^(Re g)), compared in the signed-log domain.
struct LevelRadius {
    double value = 0.0;
    bool is_log = false;

    static LevelRadius linear(double r) { return {r, false}; }
    static LevelRadius log(double log_r) { return {log_r, true}; }
};

struct SublevelComponent {
    int id = 0;
    cplx sample_point{0.0, 0.0}; // center of the first (row-major) cell
    int cell_count = 0;
    bool touches_window_boundary = false;
    std::vector<cplx> a_points;        // refined preimages of a inside the component
    std::vector<int32_t> cells;        // row-major cell indices, ascending
};

std::vector<SublevelComponent> sublevel_components(const EntireFunctionSpec& spec, cplx a,
                                                   LevelRadius r, const Window& window,
                                                   int threads = 0);

struct ComponentLadder {
    struct Node {
        int radius_index = 0;
        SublevelComponent component;
        int parent = -1;
        std::vector<int> children;
    };
    std::vector<LevelRadius> radii; // strictly decreasing
    std::vector<Node> nodes;
    Window window;

    std::vector<int> roots() const;
    /// Root-to-node chain of node indices.
    std::vector<int> chain_to(int node) const;
    /// Deepest chain below `root` (first-child order breaks ties).
    std::vector<int> deepest_chain(int root) const;
};

ComponentLadder component_ladder(const EntireFunctionSpec& spec, cplx a,
                                 const std::vector<LevelRadius>& radii, const Window& window,
                                 int threads = 0);

enum class SingularityClass { DirectCandidate, IndirectCandidate, Inconclusive };

const char* singularity_class_name(SingularityClass c);

struct SingularityReport {
    SingularityClass classification = SingularityClass::Inconclusive;
    bool splitting_detected = false;
    std::string witness;
};

/// Classify the chain (a root-to-leaf path of ladder node indices).
/// Direct: the a_points are empty from some node onward.  Indirect: every
/// node carries a_points.  splitting_detected marks any chain node with >= 2
/// children, which for a direct candidate witnesses a non-logarithmic
/// singularity.
SingularityReport classify_singularity(const ComponentLadder& ladder,
                                       const std::vector<int>& chain);

/// Number of closed boundary contours of the component's cell union
/// (1 = connected boundary).  The component must not touch the window edge.
int boundary_cycles(const SublevelComponent& component, const Window& window);

enum class DisconnectednessVerdict { DisconnectedWitnessed, Inconclusive };

struct DisconnectednessResult {
    int component_count = 0;
    DisconnectednessVerdict verdict = DisconnectednessVerdict::Inconclusive;
    std::vector<SublevelComponent> components;
};

/// Count window components of f^-1(B(disc_center, disc_radius)); >= 2 witnesses
/// a disconnected preimage.  The disc must not contain the omitted point a.
DisconnectednessResult disconnectedness_check(const EntireFunctionSpec& spec, cplx a,
                                              cplx disc_center, double disc_radius,
                                              const Window& window, int threads = 0);

/// Grid scan for preimages of a, Newton-refined to |f(z) - a| <= 1e-10,
/// deduplicated within 1e-6 and sorted by (Re, Im).  May return empty.
std::vector<cplx> find_a_points(const EntireFunctionSpec& spec, cplx a, const Window& window);

namespace detail {
/// Row-partitioned parallel fill; deterministic because rows are disjoint.
void fill_rows(int ny, int threads, const std::function<void(int)>& row_fn);
/// 4-connected labeling of marked cells; labels assigned by first row-major cell.
std::vector<int32_t> label_components(const std::vector<uint8_t>& marked, int nx, int ny,
                                      int* n_components);
} // namespace detail

} // namespace invbranch
