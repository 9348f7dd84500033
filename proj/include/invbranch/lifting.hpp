#pragma once

#include <utility>
#include <vector>

#include "invbranch/functions.hpp"

namespace invbranch {

/// Piecewise-linear curve in the w-plane, arclength-parametrized over [0, 1].
struct Polyline {
    std::vector<cplx> vertices; // >= 2, consecutive distinct
    bool closed = false;        // closed => first == last within 1e-12

    static Polyline open_path(std::vector<cplx> vertices);
    static Polyline closed_path(std::vector<cplx> vertices);
    static Polyline segment(cplx a, cplx b);
    /// Regular n-gon inscribed in the circle, CCW from start_angle, closed.
    static Polyline circle(cplx center, double radius, int n_sides, double start_angle = 0.0);

    double length() const;
    cplx at(double t) const; // t in [0, 1]
    cplx start() const { return vertices.front(); }
    cplx end() const { return vertices.back(); }
    /// Sub-path between parameters t0 < t1 (or the reversed path if t0 > t1).
    Polyline sub_path(double t0, double t1) const;
    Polyline reversed() const;
    double distance_to(cplx a) const; // min distance from a point to the polyline
};

enum class LiftStatus { Completed, HitCriticalPoint, EscapedWindow, StepUnderflow };

const char* lift_status_name(LiftStatus s);

/// Trace of an inverse-branch continuation along a curve.
struct LiftResult {
    LiftStatus status = LiftStatus::StepUnderflow;
    std::vector<std::pair<double, cplx>> path; // (parameter, z), parameters increasing
    double terminal_parameter = 0.0;

    cplx end() const { return path.back().second; }
};

/// Predictor-corrector continuation of the inverse branch through `seed`
/// along `curve`: along the accepted path |f(z(t)) - curve(t)| stays within
/// tol_track * (1 + |curve(t)|).  Stops with HitCriticalPoint when f'
/// collapses, EscapedWindow when |z| > window_radius, StepUnderflow when
/// the parameter step falls under 1e-12.
LiftResult lift_curve(const EntireFunctionSpec& spec, const Polyline& curve, cplx seed,
                      double window_radius, double tol_track);

/// lift_curve with deterministic retry: on failure the interior vertices are
/// perturbed by pseudo-random offsets of modulus <= epsilon (fixed seed) and
/// the lift is re-run, up to max_retries times.
LiftResult perturbed_lift(const EntireFunctionSpec& spec, const Polyline& curve, cplx seed,
                          double epsilon, int max_retries, double window_radius,
                          double tol_track);

/// (1/2pi) x total argument variation of (w - a) along the closed polyline,
/// summed per segment via principal-branch increments; exact integer.
int winding_number(const Polyline& curve, cplx a);

struct SweepReport {
    int n_lines = 0;
    std::vector<int> failed_line_indices;
    std::vector<cplx> singular_endpoints; // f(z) where a failed lift stopped
    double exceptional_fraction = 0.0;
    std::vector<LiftStatus> line_status;  // per line, worst status
};

/// Continue the branch from the disc center out along n_lines parallel lines
/// through the disc (direction in radians, offsets across the perpendicular
/// diameter), each way up to max_length.
SweepReport line_sweep(const EntireFunctionSpec& spec, cplx disc_center, double disc_radius,
                       cplx seed, double direction, int n_lines, double max_length,
                       double window_radius, double tol_track = 1e-8);

struct GoodCurveReport {
    int probed_components = 0;
    int compact_count = 0;
    std::vector<cplx> noncompact_candidates; // seed points
};

/// Probe compactness of preimage components of an open segment: lift from up
/// to n_seeds midpoint preimages toward both ends.  Lifts that complete stay
/// compact; window escapes mark noncompact candidates.  Lifts obstructed by
/// critical points fall back to a grid check of whether the seed's component
/// of f^-1(thin segment neighborhood) reaches the window boundary.
GoodCurveReport good_curve_probe(const EntireFunctionSpec& spec, const Polyline& segment,
                                 double window_radius, int n_seeds, double tol_track = 1e-8);

} // namespace invbranch
