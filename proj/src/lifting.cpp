#include "invbranch/lifting.hpp"
#include "invbranch/components.hpp"
#include "invbranch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace invbranch {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::vector<double> cumulative_lengths(const std::vector<cplx>& v) {
    std::vector<double> cum(v.size(), 0.0);
    for (size_t i = 1; i < v.size(); ++i) cum[i] = cum[i - 1] + std::abs(v[i] - v[i - 1]);
    return cum;
}

} // namespace

Polyline Polyline::open_path(std::vector<cplx> vertices) {
    if (vertices.size() < 2) throw error(errc::precondition, "polyline needs at least 2 vertices");
    for (size_t i = 1; i < vertices.size(); ++i)
        if (vertices[i] == vertices[i - 1])
            throw error(errc::precondition, "consecutive polyline vertices must be distinct");
    Polyline p;
    p.vertices = std::move(vertices);
    p.closed = false;
    return p;
}

Polyline Polyline::closed_path(std::vector<cplx> vertices) {
    Polyline p = open_path(std::move(vertices));
    if (std::abs(p.vertices.front() - p.vertices.back()) > 1e-12)
        throw error(errc::precondition, "closed polyline must end where it starts (within 1e-12)");
    p.closed = true;
    return p;
}

Polyline Polyline::segment(cplx a, cplx b) { return open_path({a, b}); }

Polyline Polyline::circle(cplx center, double radius, int n_sides, double start_angle) {
    if (n_sides < 3) throw error(errc::precondition, "circle polygon needs >= 3 sides");
    std::vector<cplx> v;
    v.reserve(n_sides + 1);
    for (int k = 0; k < n_sides; ++k)
        v.push_back(center + std::polar(radius, start_angle + 2.0 * M_PI * k / n_sides));
    v.push_back(v.front());
    return closed_path(std::move(v));
}

double Polyline::length() const { return cumulative_lengths(vertices).back(); }

cplx Polyline::at(double t) const {
    const auto cum = cumulative_lengths(vertices);
    const double total = cum.back();
    const double s = std::clamp(t, 0.0, 1.0) * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), s);
    size_t i = (it == cum.begin()) ? 0 : (it - cum.begin() - 1);
    if (i >= vertices.size() - 1) i = vertices.size() - 2;
    const double seg = cum[i + 1] - cum[i];
    const double frac = seg > 0 ? (s - cum[i]) / seg : 0.0;
    return vertices[i] + frac * (vertices[i + 1] - vertices[i]);
}

Polyline Polyline::sub_path(double t0, double t1) const {
    const bool rev = t1 < t0;
    const double lo = rev ? t1 : t0, hi = rev ? t0 : t1;
    const auto cum = cumulative_lengths(vertices);
    const double total = cum.back();
    std::vector<cplx> v;
    v.push_back(at(lo));
    for (size_t i = 1; i + 1 < vertices.size(); ++i) {
        const double ti = cum[i] / total;
        if (ti > lo && ti < hi) v.push_back(vertices[i]);
    }
    v.push_back(at(hi));
    // drop coincident points introduced when lo/hi sit on vertices
    std::vector<cplx> clean;
    for (const cplx& p : v)
        if (clean.empty() || std::abs(p - clean.back()) > 0.0) clean.push_back(p);
    if (clean.size() < 2) throw error(errc::precondition, "degenerate sub-path");
    if (rev) std::reverse(clean.begin(), clean.end());
    return open_path(std::move(clean));
}

Polyline Polyline::reversed() const {
    std::vector<cplx> v(vertices.rbegin(), vertices.rend());
    Polyline p;
    p.vertices = std::move(v);
    p.closed = closed;
    return p;
}

double Polyline::distance_to(cplx a) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < vertices.size(); ++i) {
        const cplx p = vertices[i - 1], q = vertices[i];
        const cplx d = q - p;
        const double len2 = std::norm(d);
        double s = len2 > 0 ? ((a - p) * std::conj(d)).real() / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        best = std::min(best, std::abs(a - (p + s * d)));
    }
    return best;
}

const char* lift_status_name(LiftStatus s) {
    switch (s) {
        case LiftStatus::Completed: return "completed";
        case LiftStatus::HitCriticalPoint: return "hit_critical_point";
        case LiftStatus::EscapedWindow: return "escaped_window";
        case LiftStatus::StepUnderflow: return "step_underflow";
    }
    return "?";
}

namespace {

struct StepEval {
    cplx value;
    cplx deriv;
};

using EvalFn = std::function<std::optional<StepEval>(cplx)>;
using TargetFn = std::function<cplx(double)>;
using ScaleFn = std::function<double(double)>;

constexpr double kStepFloor = 1e-12;
constexpr double kCritFactor = 1e-10; // |f'| < kCritFactor * (1 + |f|) ends the lift

// Near a simple critical point the two colliding preimages sit about
// sqrt(tol/|f''|) apart; once |f'|^2 falls under ~tol |f''| the branch can no
// longer be resolved at the tracking tolerance.
bool near_branch_point(const EvalFn& eval, cplx z, const StepEval& e, double tol_track) {
    const double scale = 1.0 + std::abs(e.value);
    if (std::abs(e.deriv) < kCritFactor * scale) return true;
    if (std::abs(e.deriv) >= 1e-2 * scale) return false;
    const double h = 1e-6 * (1.0 + std::abs(z));
    auto ep = eval(z + cplx(h, 0.0));
    auto em = eval(z - cplx(h, 0.0));
    if (!ep || !em) return false;
    const double f2 = std::abs(ep->deriv - em->deriv) / (2.0 * h);
    return std::abs(e.deriv) * std::abs(e.deriv) < 10.0 * tol_track * scale * f2;
}

LiftResult run_tracker(const EvalFn& eval, const TargetFn& target, const ScaleFn& scale,
                       cplx seed, double window_radius, double tol_track) {
    LiftResult res;
    res.path.push_back({0.0, seed});
    res.terminal_parameter = 0.0;

    double t = 0.0, dt = 1.0 / 32.0;
    cplx z = seed;
    cplx w_cur = target(0.0);
    bool crit_seen = false;

    auto finish = [&](LiftStatus st) {
        res.status = st;
        res.terminal_parameter = t;
        return res;
    };

    while (t < 1.0) {
        double t_next = std::min(1.0, t + dt);
        if (1.0 - t_next < kStepFloor) t_next = 1.0;
        const cplx w_next = target(t_next);
        const double tol_here = tol_track * scale(t_next);

        auto e0 = eval(z);
        bool accepted = false, crit_here = false;
        cplx zi = z;
        if (e0 && std::abs(e0->deriv) > 1e-300) {
            const double jump_cap =
                16.0 * std::abs(w_next - w_cur) / std::abs(e0->deriv) + 1e3 * tol_here + 1e-9;
            zi = z + (w_next - w_cur) / e0->deriv; // predictor
            for (int it = 0; it < 16; ++it) {
                if (!finite(zi) || std::abs(zi - z) > jump_cap) break;
                auto e = eval(zi);
                if (!e) break;
                const cplx r = e->value - w_next;
                if (std::abs(r) <= 0.1 * tol_here) {
                    accepted = true;
                    break;
                }
                if (near_branch_point(eval, zi, *e, tol_track)) {
                    crit_here = true;
                    break;
                }
                zi -= r / e->deriv;
            }
        }

        if (accepted) {
            z = zi;
            t = t_next;
            w_cur = w_next;
            res.path.push_back({t, z});
            if (std::abs(z) > window_radius) return finish(LiftStatus::EscapedWindow);
            auto ez = eval(z);
            if (ez && near_branch_point(eval, z, *ez, tol_track))
                return finish(LiftStatus::HitCriticalPoint);
            dt = std::min(dt * 1.6, 1.0 / 16.0);
        } else {
            crit_seen = crit_seen || crit_here;
            dt *= 0.5;
            if (dt < kStepFloor) {
                auto ez = eval(z);
                const bool near_crit =
                    crit_seen ||
                    (ez && std::abs(ez->deriv) < 1e-4 * (1.0 + std::abs(ez->value)));
                return finish(near_crit ? LiftStatus::HitCriticalPoint : LiftStatus::StepUnderflow);
            }
        }
    }

    // Polish the endpoint to near machine precision; monodromy endpoints are
    // then far inside the 1e-9 acceptance band.
    for (int it = 0; it < 8; ++it) {
        auto e = eval(z);
        if (!e || std::abs(e->deriv) < 1e-300) break;
        const cplx r = e->value - w_cur;
        if (std::abs(r) <= 1e-14 * scale(1.0)) break;
        const cplx zn = z - r / e->deriv;
        if (!finite(zn) || std::abs(zn - z) > tol_track * 1e3 + 1e-6) break;
        z = zn;
    }
    res.path.back().second = z;
    res.status = LiftStatus::Completed;
    res.terminal_parameter = 1.0;
    return res;
}

EvalFn plain_eval(const EntireFunctionSpec& spec) {
    return [spec](cplx z) -> std::optional<StepEval> {
        if (!finite(z)) return std::nullopt;
        EvalResult e = eval_fn(spec, z);
        if (e.overflow) return std::nullopt;
        return StepEval{e.value, e.derivative};
    };
}

// Tower: continue in the log plane, solving g(z) = c(t) with c the unwrapped
// logarithm of the target curve (f = e^g overflows; g is directly computable).
EvalFn tower_log_eval(const EntireFunctionSpec& spec) {
    const double tol_log = spec.truncation_tol_log;
    return [tol_log](cplx z) -> std::optional<StepEval> {
        if (!finite(z) || std::abs(z) > 1e12) return std::nullopt;
        const TowerSums s = tower_sums(z, tol_log);
        if (s.log_scale > 690.0) return std::nullopt; // |g| beyond double range
        const double m = std::isinf(s.log_scale) ? 0.0 : std::exp(s.log_scale);
        const cplx g = m * s.normalized_sum;
        const cplx gp = (z == cplx(0.0, 0.0)) ? cplx(0.0, 0.0) : m * s.weighted_sum / z;
        return StepEval{g, gp};
    };
}

// Continuous log along the polyline; each vertex carries the unwrapped value.
struct LogTarget {
    const Polyline* curve;
    std::vector<double> cum;
    std::vector<cplx> vertex_logs;

    explicit LogTarget(const Polyline& c) : curve(&c) {
        if (c.distance_to(cplx(0.0, 0.0)) <= 1e-12)
            throw error(errc::precondition, "log-plane target curve passes through 0");
        cum = cumulative_lengths(c.vertices);
        vertex_logs.resize(c.vertices.size());
        vertex_logs[0] = std::log(c.vertices[0]);
        for (size_t i = 1; i < c.vertices.size(); ++i)
            vertex_logs[i] = vertex_logs[i - 1] + std::log(c.vertices[i] / c.vertices[i - 1]);
    }

    cplx operator()(double t) const {
        const double total = cum.back();
        const double s = std::clamp(t, 0.0, 1.0) * total;
        auto it = std::upper_bound(cum.begin(), cum.end(), s);
        size_t i = (it == cum.begin()) ? 0 : (it - cum.begin() - 1);
        if (i >= curve->vertices.size() - 1) i = curve->vertices.size() - 2;
        const double seg = cum[i + 1] - cum[i];
        const double frac = seg > 0 ? (s - cum[i]) / seg : 0.0;
        const cplx w = curve->vertices[i] + frac * (curve->vertices[i + 1] - curve->vertices[i]);
        return vertex_logs[i] + std::log(w / curve->vertices[i]);
    }
};

} // namespace

LiftResult lift_curve(const EntireFunctionSpec& spec, const Polyline& curve, cplx seed,
                      double window_radius, double tol_track) {
    if (!(tol_track > 0)) throw error(errc::precondition, "tol_track must be positive");

    if (spec.kind == FunctionKind::DyadicTower) {
        EvalFn eval = tower_log_eval(spec);
        LogTarget raw(curve);
        auto e0 = eval(seed);
        if (!e0) throw error(errc::precondition, "seed not evaluable in the log plane");
        // Align the unwrapped log to the seed's branch of log f.
        const cplx c0 = raw(0.0);
        const double shift =
            2.0 * M_PI * std::round((e0->value.imag() - c0.imag()) / (2.0 * M_PI));
        TargetFn target = [raw = std::move(raw), shift](double t) {
            cplx c = raw(t);
            return cplx(c.real(), c.imag() + shift);
        };
        const cplx cs = target(0.0);
        if (std::abs(e0->value - cs) > tol_track * (1.0 + std::abs(cs)))
            throw error(errc::precondition, "seed does not map near the curve start (log plane)");
        ScaleFn scale = [](double) { return 1.0; }; // absolute tolerance in the log plane
        return run_tracker(eval, target, scale, seed, window_radius, tol_track);
    }

    EvalFn eval = plain_eval(spec);
    auto e0 = eval(seed);
    const cplx w0 = curve.start();
    if (!e0 || std::abs(e0->value - w0) > tol_track * (1.0 + std::abs(w0)))
        throw error(errc::precondition, "seed does not map near the curve start");
    TargetFn target = [&curve](double t) { return curve.at(t); };
    ScaleFn scale = [&curve](double t) { return 1.0 + std::abs(curve.at(t)); };
    return run_tracker(eval, target, scale, seed, window_radius, tol_track);
}

LiftResult perturbed_lift(const EntireFunctionSpec& spec, const Polyline& curve, cplx seed,
                          double epsilon, int max_retries, double window_radius,
                          double tol_track) {
    LiftResult last = lift_curve(spec, curve, seed, window_radius, tol_track);
    if (last.status == LiftStatus::Completed || epsilon <= 0.0 || max_retries <= 0) return last;

    std::mt19937_64 rng(0x1f7b2a9cULL);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int attempt = 1; attempt <= max_retries; ++attempt) {
        std::vector<cplx> v = curve.vertices;
        for (size_t i = 1; i + 1 < v.size(); ++i)
            v[i] += std::polar(epsilon * std::sqrt(uni(rng)), 2.0 * M_PI * uni(rng));
        // re-validate; a pathological perturbation is just skipped
        bool ok = true;
        for (size_t i = 1; i < v.size(); ++i)
            if (v[i] == v[i - 1]) ok = false;
        if (!ok) continue;
        Polyline pert;
        pert.vertices = std::move(v);
        pert.closed = curve.closed;
        LiftResult r = lift_curve(spec, pert, seed, window_radius, tol_track);
        if (r.status == LiftStatus::Completed) return r;
        last = std::move(r);
    }
    return last;
}

int winding_number(const Polyline& curve, cplx a) {
    if (!curve.closed) throw error(errc::not_closed, "winding number needs a closed curve");
    if (curve.distance_to(a) < 1e-9) throw error(errc::on_curve, "point lies on the curve");
    double total = 0.0;
    for (size_t i = 1; i < curve.vertices.size(); ++i)
        total += std::arg((curve.vertices[i] - a) / (curve.vertices[i - 1] - a));
    const double w = total / (2.0 * M_PI);
    const long long n = std::llround(w);
    if (std::abs(w - (double)n) > 1e-6)
        throw error(errc::precondition, "argument variation failed to round to an integer");
    return (int)n;
}

SweepReport line_sweep(const EntireFunctionSpec& spec, cplx disc_center, double disc_radius,
                       cplx seed, double direction, int n_lines, double max_length,
                       double window_radius, double tol_track) {
    if (n_lines < 1) throw error(errc::precondition, "n_lines must be >= 1");
    EvalResult es = eval_fn(spec, seed);
    if (es.overflow || std::abs(es.value - disc_center) >= disc_radius)
        throw error(errc::precondition, "seed must map into the disc");

    const cplx dir = std::polar(1.0, direction);
    const cplx perp = std::polar(1.0, direction + M_PI / 2.0);

    SweepReport rep;
    rep.n_lines = n_lines;
    for (int i = 0; i < n_lines; ++i) {
        const double offset = -disc_radius + (i + 0.5) * (2.0 * disc_radius / n_lines);
        const cplx foot = disc_center + offset * perp;

        LiftStatus worst = LiftStatus::Completed;
        cplx fail_at{0.0, 0.0};
        cplx z_foot = seed;
        bool reached_foot = true;

        if (std::abs(es.value - foot) > 1e-14 * (1.0 + std::abs(foot))) {
            LiftResult approach = lift_curve(spec, Polyline::segment(es.value, foot), seed,
                                             window_radius, tol_track);
            if (approach.status != LiftStatus::Completed) {
                worst = approach.status;
                fail_at = eval_fn(spec, approach.end()).value;
                reached_foot = false;
            } else {
                z_foot = approach.end();
            }
        }

        if (reached_foot) {
            for (double sgn : {+1.0, -1.0}) {
                LiftResult half = lift_curve(
                    spec, Polyline::segment(foot, foot + sgn * max_length * dir), z_foot,
                    window_radius, tol_track);
                if (half.status != LiftStatus::Completed) {
                    worst = half.status;
                    fail_at = eval_fn(spec, half.end()).value;
                    break;
                }
            }
        }

        rep.line_status.push_back(worst);
        if (worst != LiftStatus::Completed) {
            rep.failed_line_indices.push_back(i);
            rep.singular_endpoints.push_back(fail_at);
        }
    }
    rep.exceptional_fraction = (double)rep.failed_line_indices.size() / (double)n_lines;
    return rep;
}

GoodCurveReport good_curve_probe(const EntireFunctionSpec& spec, const Polyline& segment,
                                 double window_radius, int n_seeds, double tol_track) {
    if (segment.closed) throw error(errc::precondition, "good-curve probe needs an open curve");
    if (!(segment.length() > 0)) throw error(errc::precondition, "zero-length curve");
    if (n_seeds < 1) throw error(errc::precondition, "n_seeds must be >= 1");

    const cplx mid = segment.at(0.5);
    Window scan = Window::square(window_radius, std::max(window_radius / 200.0, 1e-3));
    std::vector<cplx> seeds = find_a_points(spec, mid, scan);
    if (seeds.empty()) throw error(errc::no_seeds, "no preimage of the curve midpoint in the window");
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](cplx u, cplx v) { return std::abs(u) < std::abs(v); });
    if ((int)seeds.size() > n_seeds) seeds.resize(n_seeds);

    const Polyline to_start = segment.sub_path(0.5, 0.0);
    const Polyline to_end = segment.sub_path(0.5, 1.0);

    // Lazy grid fallback for lifts stopped by critical points: does the seed's
    // component of f^-1(thin neighborhood of the segment) reach the window edge?
    const double delta = std::min(0.05, 0.1 * segment.length());
    Window grid = Window::square(window_radius, std::max(window_radius / 400.0, 1e-3));
    std::vector<int32_t> label;
    std::vector<uint8_t> label_touches;
    auto ensure_grid = [&]() {
        if (!label.empty()) return;
        const int nx = grid.nx(), ny = grid.ny();
        std::vector<uint8_t> marked((size_t)nx * ny, 0);
        detail::fill_rows(ny, 0, [&](int iy) {
            for (int ix = 0; ix < nx; ++ix) {
                EvalResult e = eval_fn(spec, grid.cell_center(ix, iy));
                if (!e.overflow && segment.distance_to(e.value) < delta)
                    marked[(size_t)iy * nx + ix] = 1;
            }
        });
        int n_comp = 0;
        label = detail::label_components(marked, nx, ny, &n_comp);
        label_touches.assign(n_comp, 0);
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix) {
                const int32_t l = label[(size_t)iy * nx + ix];
                if (l >= 0 && (ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1))
                    label_touches[l] = 1;
            }
    };
    auto escapes_by_grid = [&](cplx seed) {
        ensure_grid();
        auto cell = grid.locate(seed);
        if (!cell) return true; // seed outside the window counts as escaped
        const int nx = grid.nx();
        int32_t l = label[(size_t)cell->second * nx + cell->first];
        for (int dy = -1; dy <= 1 && l < 0; ++dy)
            for (int dx = -1; dx <= 1 && l < 0; ++dx) {
                const int jx = cell->first + dx, jy = cell->second + dy;
                if (jx < 0 || jy < 0 || jx >= nx || jy >= grid.ny()) continue;
                l = label[(size_t)jy * nx + jx];
            }
        return l >= 0 && label_touches[l] != 0;
    };

    GoodCurveReport rep;
    rep.probed_components = (int)seeds.size();
    for (const cplx& seed : seeds) {
        const LiftResult r1 = lift_curve(spec, to_start, seed, window_radius, tol_track);
        const LiftResult r2 = lift_curve(spec, to_end, seed, window_radius, tol_track);
        bool noncompact = false;
        if (r1.status == LiftStatus::EscapedWindow || r2.status == LiftStatus::EscapedWindow) {
            noncompact = true;
        } else if (r1.status != LiftStatus::Completed || r2.status != LiftStatus::Completed) {
            noncompact = escapes_by_grid(seed);
        }
        if (noncompact)
            rep.noncompact_candidates.push_back(seed);
        else
            rep.compact_count++;
    }
    return rep;
}

} // namespace invbranch
