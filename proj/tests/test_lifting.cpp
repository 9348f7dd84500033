#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "invbranch/errors.hpp"
#include "invbranch/lifting.hpp"

using namespace invbranch;

namespace {

const auto kExp = EntireFunctionSpec::exp_fn();
const auto kSinc = EntireFunctionSpec::sinc();
const auto kSquare = EntireFunctionSpec::polynomial({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});

void check_tracking_invariant(const EntireFunctionSpec& spec, const Polyline& curve,
                              const LiftResult& r, double tol) {
    for (const auto& [t, z] : r.path) {
        const cplx w = curve.at(t);
        CHECK(std::abs(eval_fn(spec, z).value - w) <= tol * (1.0 + std::abs(w)));
    }
}

} // namespace

TEST_CASE("polyline plumbing") {
    auto seg = Polyline::segment({0.0, 0.0}, {2.0, 0.0});
    CHECK(seg.length() == doctest::Approx(2.0));
    CHECK(std::abs(seg.at(0.25) - cplx(0.5, 0.0)) < 1e-15);

    auto circ = Polyline::circle({0.0, 0.0}, 1.0, 64);
    CHECK(circ.closed);
    CHECK(circ.vertices.size() == 65);
    CHECK(std::abs(circ.vertices.front() - circ.vertices.back()) == 0.0);
    CHECK(circ.length() == doctest::Approx(64.0 * 2.0 * std::sin(M_PI / 64.0)));
    CHECK(circ.distance_to({0.0, 0.0}) == doctest::Approx(std::cos(M_PI / 64.0)));

    auto sub = seg.sub_path(0.5, 0.0); // reversed half
    CHECK(std::abs(sub.start() - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(sub.end() - cplx(0.0, 0.0)) < 1e-15);

    CHECK_THROWS_AS(Polyline::open_path({{1.0, 0.0}}), error);
    CHECK_THROWS_AS(Polyline::open_path({{1.0, 0.0}, {1.0, 0.0}}), error);
    CHECK_THROWS_AS(Polyline::closed_path({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}), error);
}

TEST_CASE("winding numbers of simple polygons") {
    const auto circle = Polyline::circle({0.0, 0.0}, 1.0, 64);
    CHECK(winding_number(circle, {0.0, 0.0}) == 1);
    CHECK(winding_number(circle, {5.0, 0.0}) == 0);

    // square traversed twice
    std::vector<cplx> sq{{2.0, 2.0},  {-2.0, 2.0}, {-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0},
                         {-2.0, 2.0}, {-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0}};
    CHECK(winding_number(Polyline::closed_path(sq), {0.0, 0.0}) == 2);

    // clockwise negates
    auto cw = circle.reversed();
    CHECK(winding_number(cw, {0.0, 0.0}) == -1);

    CHECK_THROWS_AS(winding_number(Polyline::segment({0.0, 0.0}, {1.0, 0.0}), {5.0, 0.0}), error);
    CHECK_THROWS_AS(winding_number(circle, {1.0, 0.0}), error); // on the curve
}

TEST_CASE("winding number is additive under concatenation and flips under reversal") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const cplx base{2.0, 0.0};
        auto c1 = Polyline::circle(base, 1.0 + 0.5 * uni(rng), 48);
        auto c2 = Polyline::circle(base, 0.4 + 0.2 * uni(rng), 32);
        // concatenate through the shared base ray: run c1, bridge to c2's
        // start, run c2, bridge home
        std::vector<cplx> cat = c1.vertices;
        cat.insert(cat.end(), c2.vertices.begin(), c2.vertices.end());
        cat.push_back(c1.vertices.front());
        const auto joined = Polyline::closed_path(cat);

        const cplx a{2.0 + 0.05 * uni(rng), 0.3 * uni(rng)};
        if (joined.distance_to(a) < 1e-3) continue;
        const int w1 = winding_number(c1, a);
        const int w2 = winding_number(c2, a);
        CHECK(winding_number(joined, a) == w1 + w2);
        CHECK(winding_number(c1.reversed(), a) == -w1);
    }
}

TEST_CASE("exp lift around the unit circle gains 2 pi i") {
    const auto circle = Polyline::circle({0.0, 0.0}, 1.0, 64);
    const auto r = lift_curve(kExp, circle, {0.0, 0.0}, 40.0, 1e-8);
    REQUIRE(r.status == LiftStatus::Completed);
    CHECK(r.terminal_parameter == 1.0);
    CHECK(std::abs(r.end() - cplx(0.0, 2.0 * M_PI)) <= 1e-9);
    check_tracking_invariant(kExp, circle, r, 1e-8);

    // parameters strictly increase from the seed
    CHECK(r.path.front().first == 0.0);
    CHECK(std::abs(r.path.front().second) == 0.0);
    for (size_t i = 1; i < r.path.size(); ++i)
        CHECK(r.path[i].first > r.path[i - 1].first);
}

TEST_CASE("square-root monodromy: circle lift lands on -1") {
    const auto circle = Polyline::circle({0.0, 0.0}, 1.0, 64);
    const auto r = lift_curve(kSquare, circle, {1.0, 0.0}, 40.0, 1e-8);
    REQUIRE(r.status == LiftStatus::Completed);
    CHECK(std::abs(r.end() - cplx(-1.0, 0.0)) <= 1e-9);
    check_tracking_invariant(kSquare, circle, r, 1e-8);
}

TEST_CASE("lift into a critical value stops near the critical point") {
    const auto seg = Polyline::segment({1.0, 0.0}, {0.0, 0.0});
    const auto r = lift_curve(kSquare, seg, {1.0, 0.0}, 40.0, 1e-8);
    CHECK(r.status == LiftStatus::HitCriticalPoint);
    CHECK(std::abs(r.end()) < 0.05);
    CHECK(r.terminal_parameter < 1.0);
}

TEST_CASE("lift seed precondition") {
    const auto seg = Polyline::segment({1.0, 0.0}, {2.0, 0.0});
    CHECK_THROWS_AS(lift_curve(kExp, seg, {5.0, 0.0}, 40.0, 1e-8), error);
}

TEST_CASE("perturbed lift crosses a critical value") {
    // 1 -> 0 -> -1 passes through the branch point of sqrt at 0
    const auto path = Polyline::open_path({{1.0, 0.0}, {0.0, 0.0}, {-1.0, 0.0}});
    const auto direct = lift_curve(kSquare, path, {1.0, 0.0}, 40.0, 1e-8);
    CHECK(direct.status != LiftStatus::Completed);

    const auto r = perturbed_lift(kSquare, path, {1.0, 0.0}, 1e-2, 8, 40.0, 1e-8);
    REQUIRE(r.status == LiftStatus::Completed);
    // endpoint is a square root of a point within 1e-2 of -1
    const double dist = std::min(std::abs(r.end() - cplx(0.0, 1.0)),
                                 std::abs(r.end() - cplx(0.0, -1.0)));
    CHECK(dist <= 1e-2);

    // epsilon = 0 reproduces lift_curve exactly
    const auto again = perturbed_lift(kSquare, path, {1.0, 0.0}, 0.0, 8, 40.0, 1e-8);
    CHECK(again.status == direct.status);
    CHECK(again.end() == direct.end());

    // an unobstructed lift never retries
    const auto circle = Polyline::circle({2.0, 0.0}, 0.5, 32);
    const auto a = lift_curve(kExp, circle, std::log(cplx(2.5, 0.0)), 40.0, 1e-8);
    const auto b = perturbed_lift(kExp, circle, std::log(cplx(2.5, 0.0)), 1e-3, 8, 40.0, 1e-8);
    CHECK(a.end() == b.end());
}

TEST_CASE("homotopy consistency under refinement") {
    const auto circle = Polyline::circle({0.0, 0.0}, 1.0, 32);
    std::vector<cplx> refined;
    for (size_t i = 1; i < circle.vertices.size(); ++i) {
        refined.push_back(circle.vertices[i - 1]);
        refined.push_back(0.5 * (circle.vertices[i - 1] + circle.vertices[i]));
    }
    refined.push_back(circle.vertices.back());
    const auto fine = Polyline::closed_path(refined);

    const double tol = 1e-8;
    const auto a = lift_curve(kExp, circle, {0.0, 0.0}, 40.0, tol);
    const auto b = lift_curve(kExp, fine, {0.0, 0.0}, 40.0, tol);
    REQUIRE(a.status == LiftStatus::Completed);
    REQUIRE(b.status == LiftStatus::Completed);
    CHECK(std::abs(a.end() - b.end()) <= 10.0 * tol);
}

TEST_CASE("a closed completed lift of an omitting function has winding 0") {
    // circle around 2 avoids the singular value 0 of log; the lift closes up
    const auto circle = Polyline::circle({2.0, 0.0}, 0.5, 48);
    const cplx seed = std::log(cplx(2.5, 0.0));
    const auto r = lift_curve(kExp, circle, seed, 40.0, 1e-10);
    REQUIRE(r.status == LiftStatus::Completed);
    REQUIRE(std::abs(r.end() - seed) < 1e-9);

    std::vector<cplx> image;
    for (const auto& [t, z] : r.path) image.push_back(std::exp(z));
    image.push_back(std::exp(r.path.front().second));
    // exp omits 0, so the image of the closed z-loop cannot wind around 0
    CHECK(winding_number(Polyline::closed_path(image), {0.0, 0.0}) == 0);
}

TEST_CASE("tower lift in the log plane") {
    // f = exp(g) with moderate values near z = 3; a small closed circle about
    // f(3) lifts back to the seed
    const auto tower = EntireFunctionSpec::dyadic_tower();
    const cplx z0{3.0, 0.0};
    const cplx f0 = eval_fn(tower, z0).value;
    // circle starting at f0, circling f0 - 1/2 (no critical value enclosed)
    const auto circle = Polyline::circle(f0 - 0.5, 0.5, 32);
    const auto r = lift_curve(tower, circle, z0, 40.0, 1e-8);
    REQUIRE(r.status == LiftStatus::Completed);
    CHECK(std::abs(r.end() - z0) <= 1e-7);
}

TEST_CASE("line sweep of exp across a disc around 2") {
    // the only finite singular value of log is 0; with 101 offsets exactly the
    // center line hits it
    const auto rep = line_sweep(kExp, {2.0, 0.0}, 0.5, std::log(cplx(2.0, 0.0)), 0.0, 101, 10.0,
                                60.0);
    CHECK(rep.n_lines == 101);
    REQUIRE(rep.failed_line_indices.size() == 1);
    CHECK(rep.failed_line_indices[0] == 50); // the offset-0 line through w = 0
    CHECK(rep.exceptional_fraction <= 1.0 / 101.0);
    CHECK(std::abs(rep.singular_endpoints[0]) < 1e-3); // stalls next to 0

    // oracle: a line fails iff it passes within tolerance of w = 0
    for (int i = 0; i < 101; ++i) {
        const double offset = -0.5 + (i + 0.5) * (1.0 / 101.0);
        const bool hits_zero = std::abs(offset) < 1e-12; // the sweep reaches Re w < 0
        const bool failed = std::find(rep.failed_line_indices.begin(),
                                      rep.failed_line_indices.end(), i) !=
                            rep.failed_line_indices.end();
        CHECK(failed == hits_zero);
    }
}

TEST_CASE("line sweep of z^2 away from the critical value") {
    // strip around B(4,1) swept horizontally by 3 to each side stays clear of 0
    const auto rep = line_sweep(kSquare, {4.0, 0.0}, 1.0, {2.0, 0.0}, 0.0, 25, 3.0, 40.0);
    CHECK(rep.exceptional_fraction == 0.0);
    CHECK(rep.failed_line_indices.empty());
}

TEST_CASE("single-line sweep agrees with direct lifts") {
    const auto rep = line_sweep(kExp, {2.0, 0.0}, 0.5, std::log(cplx(2.0, 0.0)), M_PI / 2.0, 1,
                                2.0, 60.0);
    CHECK(rep.n_lines == 1);
    CHECK(rep.failed_line_indices.empty());
    // direct: lift up and down from the disc center along the vertical line
    const cplx up{2.0, 2.0}, down{2.0, -2.0};
    const auto lift_up = lift_curve(kExp, Polyline::segment({2.0, 0.0}, up),
                                    std::log(cplx(2.0, 0.0)), 60.0, 1e-8);
    const auto lift_down = lift_curve(kExp, Polyline::segment({2.0, 0.0}, down),
                                      std::log(cplx(2.0, 0.0)), 60.0, 1e-8);
    CHECK(lift_up.status == LiftStatus::Completed);
    CHECK(lift_down.status == LiftStatus::Completed);
    CHECK(std::abs(std::exp(lift_up.end()) - up) < 1e-7);
    CHECK(std::abs(std::exp(lift_down.end()) - down) < 1e-7);
}

TEST_CASE("good curve probe on sinc") {
    // [-i, i] is good: all probed components compact
    const auto good = good_curve_probe(kSinc, Polyline::segment({0.0, -1.0}, {0.0, 1.0}), 40.0, 8);
    CHECK(good.probed_components == good.compact_count);
    CHECK(good.noncompact_candidates.empty());

    // [-1/10, 1/10] is not good: |sinc| < 1/10 along the whole real tail
    const auto bad = good_curve_probe(kSinc, Polyline::segment({-0.1, 0.0}, {0.1, 0.0}), 40.0, 8);
    CHECK(bad.probed_components == bad.compact_count + (int)bad.noncompact_candidates.size());
    CHECK(bad.noncompact_candidates.size() >= 1);
}

TEST_CASE("good curve probe on exp over [1,2]") {
    const auto rep = good_curve_probe(kExp, Polyline::segment({1.0, 0.0}, {2.0, 0.0}), 40.0, 6);
    CHECK(rep.noncompact_candidates.empty());
    CHECK(rep.compact_count == rep.probed_components);
}

TEST_CASE("good curve probe needs seeds") {
    // exp never takes 0, so the midpoint of [-0.1, 0.1] has no preimage
    CHECK_THROWS_AS(good_curve_probe(kExp, Polyline::segment({-0.1, 0.0}, {0.1, 0.0}), 20.0, 4),
                    error);
}
