#pragma once

#include <cstdint>
#include <vector>

namespace invbranch {

/// Discrete model of a singular measure on the unit circle: finitely many
/// atoms, or a Cantor-like measure discretized by concentrating the mass of
/// each depth-level interval at its midpoint.
struct SingularMeasureSpec {
    struct Atom {
        double theta = 0.0; // (-pi, pi]
        double mass = 0.0;  // > 0
    };

    enum class Kind { Atoms, CantorLike };
    Kind kind = Kind::Atoms;
    std::vector<Atom> support; // discretized atoms, sorted by angle
    int depth = 0;             // CantorLike parameters, kept for reporting
    double arc_a = 0.0, arc_b = 0.0;

    static SingularMeasureSpec atoms(std::vector<Atom> atoms);
    /// Middle-thirds construction on (a, b), depth <= 20; mass sits at the
    /// midpoints of the 2^depth depth-level intervals.
    static SingularMeasureSpec cantor_like(int depth, double a, double b, double total_mass);

    double total_mass() const;
    /// Mass of the open circular interval (theta - eps, theta + eps).
    double mass_near(double theta, double eps) const;
};

struct PoissonEval {
    double r = 0.0;
    double theta = 0.0;
    double value = 0.0; // >= 0
};

/// u(r e^{i theta}) = (1/2pi) sum_j mass_j (1-r^2)/(1+r^2-2r cos(t_j-theta)).
PoissonEval poisson_integral(const SingularMeasureSpec& measure, double r, double theta);

struct DivergenceScan {
    double theta_star = 0.0;
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<uint8_t> lower_bound_ok; // u >= mass(theta*-eps, theta*+eps)/(2 pi eps), eps = 1-r
    bool all_bounds_hold = false;
};

/// Locate theta* in the open arc (a, b) maximizing u at the largest ladder
/// radius and evaluate u along the ladder, checking the kernel lower bound at
/// every rung (slack factor 1 + 1e-6).  Throws ZERO_MASS when the arc carries
/// no mass.
DivergenceScan divergence_scan(const SingularMeasureSpec& measure, double arc_a, double arc_b,
                               const std::vector<double>& r_ladder);

} // namespace invbranch
