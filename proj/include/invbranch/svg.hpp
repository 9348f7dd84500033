#pragma once

#include <string>

#include "invbranch/dyadic_tree.hpp"

namespace invbranch {

/// Versioned drawing style; byte-identical output for identical inputs.
struct SvgStyle {
    int version = 1;
    double px_per_unit = 4.0;
    double stroke_main = 1.2;  // spokes, arcs, root segment
    double stroke_ray = 0.9;   // rays, dotted
    double stroke_axis = 0.5;
    std::string color_main = "#000000";
    std::string color_ray = "#555555";
    std::string color_axis = "#c8c8c8";
    std::string dash_ray = "2,3";

    static SvgStyle versioned(int version);
};

/// Render the tree clipped to the window: rays dotted, spokes/arcs/root solid,
/// light axes across the window.
std::string render_svg(const TreeGraph& tree, const Window& window, const SvgStyle& style);

} // namespace invbranch
