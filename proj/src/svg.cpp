#include "invbranch/svg.hpp"
#include "invbranch/errors.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>

namespace invbranch {

SvgStyle SvgStyle::versioned(int version) {
    if (version != 1) throw error(errc::precondition, "unknown style version");
    return SvgStyle{};
}

namespace {

struct Clipper {
    double x0, y0, x1, y1; // window rect in world coordinates

    // Liang-Barsky; returns false when the segment misses the rectangle.
    bool clip(cplx a, cplx b, cplx* ca, cplx* cb) const {
        double t0 = 0.0, t1 = 1.0;
        const double dx = b.real() - a.real(), dy = b.imag() - a.imag();
        const double p[4] = {-dx, dx, -dy, dy};
        const double q[4] = {a.real() - x0, x1 - a.real(), a.imag() - y0, y1 - a.imag()};
        for (int i = 0; i < 4; ++i) {
            if (p[i] == 0.0) {
                if (q[i] < 0.0) return false;
            } else {
                const double r = q[i] / p[i];
                if (p[i] < 0.0) {
                    if (r > t1) return false;
                    if (r > t0) t0 = r;
                } else {
                    if (r < t0) return false;
                    if (r < t1) t1 = r;
                }
            }
        }
        *ca = a + t0 * (b - a);
        *cb = a + t1 * (b - a);
        return true;
    }
};

struct Emitter {
    std::string out;
    const Window* window;
    const SvgStyle* style;
    Clipper clip;

    double px(double x) const { return (x - (window->center.real() - window->half_width)) * style->px_per_unit; }
    double py(double y) const { return ((window->center.imag() + window->half_height) - y) * style->px_per_unit; }

    void append(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        char buf[512];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, args);
        va_end(args);
        out += buf;
    }

    // Clip a polyline to the window and emit the visible pieces.
    void polyline(const std::vector<cplx>& pts, const char* klass, const std::string& color,
                  double width, const std::string& dash) {
        std::string points;
        char buf[64];
        auto flush = [&]() {
            if (points.empty()) return;
            out += "<polyline class=\"" + std::string(klass) + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"";
            std::snprintf(buf, sizeof buf, "%.2f", width);
            out += buf;
            out += "\"";
            if (!dash.empty()) out += " stroke-dasharray=\"" + dash + "\"";
            out += " points=\"" + points + "\"/>\n";
            points.clear();
        };
        cplx prev_end{0.0, 0.0};
        bool have_prev = false;
        for (size_t i = 1; i < pts.size(); ++i) {
            cplx a, b;
            if (!clip.clip(pts[i - 1], pts[i], &a, &b)) {
                flush();
                have_prev = false;
                continue;
            }
            const bool contiguous = have_prev && std::abs(a - prev_end) < 1e-9;
            if (!contiguous) {
                flush();
                std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(a.real()), py(a.imag()));
                points += buf;
            }
            std::snprintf(buf, sizeof buf, " %.2f,%.2f", px(b.real()), py(b.imag()));
            points += buf;
            prev_end = b;
            have_prev = true;
        }
        flush();
    }
};

} // namespace

std::string render_svg(const TreeGraph& tree, const Window& window, const SvgStyle& style) {
    Emitter em;
    em.window = &window;
    em.style = &style;
    em.clip = {window.center.real() - window.half_width, window.center.imag() - window.half_height,
               window.center.real() + window.half_width, window.center.imag() + window.half_height};

    const double w_px = 2.0 * window.half_width * style.px_per_unit;
    const double h_px = 2.0 * window.half_height * style.px_per_unit;
    em.append("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    em.append("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.2f %.2f\" "
              "width=\"%.0f\" height=\"%.0f\">\n",
              w_px, h_px, w_px, h_px);
    em.append("<!-- style v%d -->\n", style.version);
    em.append("<rect x=\"0\" y=\"0\" width=\"%.2f\" height=\"%.2f\" fill=\"#ffffff\"/>\n", w_px,
              h_px);

    // axes through 0
    em.polyline({cplx(window.center.real() - window.half_width, 0.0),
                 cplx(window.center.real() + window.half_width, 0.0)},
                "axis", style.color_axis, style.stroke_axis, "");
    em.polyline({cplx(0.0, window.center.imag() - window.half_height),
                 cplx(0.0, window.center.imag() + window.half_height)},
                "axis", style.color_axis, style.stroke_axis, "");

    char klass[64];
    const double corner = std::hypot(std::abs(window.center.real()) + window.half_width,
                                     std::abs(window.center.imag()) + window.half_height);
    for (const TreeSet& ray : tree.rays) {
        TreeSet drawn = ray;
        drawn.r_end = std::max(ray.r_end, corner * 1.01); // rays are unbounded; draw to the edge
        std::snprintf(klass, sizeof klass, "ray level-%d j-%d", ray.level, ray.j);
        em.polyline(drawn.sample(2), klass, style.color_ray, style.stroke_ray, style.dash_ray);
    }

    em.polyline({tree.root_segment.first, tree.root_segment.second}, "root", style.color_main,
                style.stroke_main, "");
    for (const TreeSet& spoke : tree.spokes) {
        std::snprintf(klass, sizeof klass, "spoke level-%d j-%d", spoke.level, spoke.j);
        em.polyline(spoke.sample(2), klass, style.color_main, style.stroke_main, "");
    }
    for (const TreeSet& arc : tree.arcs) {
        std::snprintf(klass, sizeof klass, "%s level-%d j-%d", tree_set_kind_name(arc.kind),
                      arc.level, arc.j);
        em.polyline(arc.sample(33), klass, style.color_main, style.stroke_main, "");
    }

    em.append("</svg>\n");
    return em.out;
}

} // namespace invbranch
