#include "invbranch/poisson.hpp"
#include "invbranch/errors.hpp"
#include "invbranch/logspace.hpp"

#include <algorithm>
#include <cmath>

namespace invbranch {

SingularMeasureSpec SingularMeasureSpec::atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw error(errc::precondition, "measure needs at least one atom");
    for (Atom& a : atoms) {
        if (!(a.mass > 0.0)) throw error(errc::precondition, "atom masses must be positive");
        a.theta = normalize_angle(a.theta);
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.theta < y.theta; });
    SingularMeasureSpec m;
    m.kind = Kind::Atoms;
    m.support = std::move(atoms);
    return m;
}

SingularMeasureSpec SingularMeasureSpec::cantor_like(int depth, double a, double b,
                                                     double total_mass) {
    if (depth < 0 || depth > 20)
        throw error(errc::precondition, "cantor depth must lie in [0, 20]");
    if (!(b > a) || !(b - a <= 2.0 * M_PI))
        throw error(errc::precondition, "cantor arc must satisfy a < b, b - a <= 2 pi");
    if (!(total_mass > 0.0)) throw error(errc::precondition, "total mass must be positive");

    std::vector<std::pair<double, double>> intervals{{a, b}};
    for (int d = 0; d < depth; ++d) {
        std::vector<std::pair<double, double>> next;
        next.reserve(intervals.size() * 2);
        for (auto [lo, hi] : intervals) {
            const double third = (hi - lo) / 3.0;
            next.push_back({lo, lo + third});
            next.push_back({hi - third, hi});
        }
        intervals = std::move(next);
    }
    std::vector<Atom> atoms;
    atoms.reserve(intervals.size());
    const double m = total_mass / (double)intervals.size();
    for (auto [lo, hi] : intervals) atoms.push_back({normalize_angle(0.5 * (lo + hi)), m});

    SingularMeasureSpec spec = SingularMeasureSpec::atoms(std::move(atoms));
    spec.kind = Kind::CantorLike;
    spec.depth = depth;
    spec.arc_a = a;
    spec.arc_b = b;
    return spec;
}

double SingularMeasureSpec::total_mass() const {
    double t = 0.0;
    for (const Atom& a : support) t += a.mass;
    return t;
}

double SingularMeasureSpec::mass_near(double theta, double eps) const {
    double t = 0.0;
    for (const Atom& a : support) {
        const double d = std::abs(std::remainder(a.theta - theta, 2.0 * M_PI));
        if (d < eps) t += a.mass;
    }
    return t;
}

PoissonEval poisson_integral(const SingularMeasureSpec& measure, double r, double theta) {
    if (!(r >= 0.0 && r < 1.0)) throw error(errc::precondition, "radius must lie in [0, 1)");
    const double r2 = r * r;
    double sum = 0.0;
    for (const auto& a : measure.support)
        sum += a.mass * (1.0 - r2) / (1.0 + r2 - 2.0 * r * std::cos(a.theta - theta));
    return {r, theta, sum / (2.0 * M_PI)};
}

DivergenceScan divergence_scan(const SingularMeasureSpec& measure, double arc_a, double arc_b,
                               const std::vector<double>& r_ladder) {
    if (!(arc_b > arc_a)) throw error(errc::precondition, "arc must satisfy a < b");
    if (r_ladder.empty()) throw error(errc::precondition, "radius ladder must be nonempty");
    for (size_t i = 0; i < r_ladder.size(); ++i) {
        if (!(r_ladder[i] >= 0.0 && r_ladder[i] < 1.0))
            throw error(errc::precondition, "ladder radii must lie in [0, 1)");
        if (i > 0 && !(r_ladder[i] > r_ladder[i - 1]))
            throw error(errc::precondition, "ladder must be strictly increasing");
    }

    auto in_arc = [&](double theta) {
        double d = std::fmod(theta - arc_a, 2.0 * M_PI);
        if (d < 0) d += 2.0 * M_PI;
        return d > 0.0 && d < arc_b - arc_a;
    };

    std::vector<double> candidates;
    for (const auto& a : measure.support)
        if (in_arc(a.theta)) candidates.push_back(a.theta);
    if (candidates.empty()) throw error(errc::zero_mass, "the arc carries no measure");

    DivergenceScan scan;
    const double r_max = r_ladder.back();
    double best = -1.0;
    for (double t : candidates) {
        const double u = poisson_integral(measure, r_max, t).value;
        if (u > best) {
            best = u;
            scan.theta_star = t;
        }
    }

    scan.radii = r_ladder;
    scan.all_bounds_hold = true;
    for (double r : r_ladder) {
        const double u = poisson_integral(measure, r, scan.theta_star).value;
        scan.values.push_back(u);
        const double eps = 1.0 - r;
        const double lower = measure.mass_near(scan.theta_star, eps) / (2.0 * M_PI * eps);
        const bool ok = u * (1.0 + 1e-6) >= lower;
        scan.lower_bound_ok.push_back(ok);
        scan.all_bounds_hold = scan.all_bounds_hold && ok;
    }
    return scan;
}

} // namespace invbranch
