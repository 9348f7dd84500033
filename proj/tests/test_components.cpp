#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "invbranch/components.hpp"
#include "invbranch/errors.hpp"

using namespace invbranch;

namespace {

bool has_point_near(const std::vector<cplx>& pts, cplx target, double tol) {
    for (const cplx& p : pts)
        if (std::abs(p - target) <= tol) return true;
    return false;
}

// cell-set containment, the nesting invariant
bool cells_subset(const std::vector<int32_t>& child, const std::vector<int32_t>& parent) {
    return std::includes(parent.begin(), parent.end(), child.begin(), child.end());
}

} // namespace

TEST_CASE("find_a_points: sinc zeros, exp omits 0, exp over 1") {
    const Window w15 = Window::square(15.0, 0.05);
    auto zeros = find_a_points(EntireFunctionSpec::sinc(), {0.0, 0.0}, w15);
    REQUIRE(zeros.size() == 8); // +-pi, +-2pi, +-3pi, +-4pi
    for (int k = 1; k <= 4; ++k) {
        CHECK(has_point_near(zeros, {k * M_PI, 0.0}, 1e-8));
        CHECK(has_point_near(zeros, {-k * M_PI, 0.0}, 1e-8));
    }

    const Window w50 = Window::square(50.0, 0.25);
    CHECK(find_a_points(EntireFunctionSpec::exp_fn(), {0.0, 0.0}, w50).empty());

    const Window w10 = Window::square(10.0, 0.1);
    auto ones = find_a_points(EntireFunctionSpec::exp_fn(), {1.0, 0.0}, w10);
    REQUIRE(ones.size() == 3);
    CHECK(has_point_near(ones, {0.0, 0.0}, 1e-9));
    CHECK(has_point_near(ones, {0.0, 2.0 * M_PI}, 1e-9));
    CHECK(has_point_near(ones, {0.0, -2.0 * M_PI}, 1e-9));
}

TEST_CASE("sublevel components of exp around 1") {
    const Window w{{0.0, 0.0}, 5.0, 10.0, 0.05};
    auto comps = sublevel_components(EntireFunctionSpec::exp_fn(), {1.0, 0.0},
                                     LevelRadius::linear(0.5), w);
    REQUIRE(comps.size() == 3);
    // ordered by first row-major cell: -2 pi i, 0, +2 pi i
    CHECK(std::abs(comps[0].sample_point.imag() + 2.0 * M_PI) < 0.6);
    CHECK(std::abs(comps[1].sample_point.imag()) < 0.6);
    CHECK(std::abs(comps[2].sample_point.imag() - 2.0 * M_PI) < 0.6);
    for (const auto& c : comps) {
        CHECK_FALSE(c.touches_window_boundary);
        REQUIRE(c.a_points.size() == 1);
        CHECK(std::abs(eval_fn(EntireFunctionSpec::exp_fn(), c.a_points[0]).value -
                       cplx(1.0, 0.0)) <= 1e-10);
    }
}

TEST_CASE("sublevel components: sinc zeros carry a-points") {
    const Window w = Window::square(15.0, 0.02);
    auto comps = sublevel_components(EntireFunctionSpec::sinc(), {0.0, 0.0},
                                     LevelRadius::linear(0.05), w);
    // 8 zero-carrying components; |sinc| also dips under 0.05 right at the
    // window edge (|sinc(15)| ~ 0.043), giving clipped strips without zeros
    int with_zero = 0;
    for (const auto& c : comps) {
        if (c.a_points.empty()) {
            CHECK(c.touches_window_boundary);
            continue;
        }
        with_zero++;
        REQUIRE(c.a_points.size() == 1);
        const double k = std::abs(c.a_points[0].real()) / M_PI;
        CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
    CHECK(with_zero == 8);
}

TEST_CASE("sublevel components: z^2 has a single component with a-point 0") {
    const Window w = Window::square(2.0, 0.01);
    const auto sq = EntireFunctionSpec::polynomial({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    auto comps = sublevel_components(sq, {0.0, 0.0}, LevelRadius::linear(0.01), w);
    REQUIRE(comps.size() == 1);
    REQUIRE(comps[0].a_points.size() == 1);
    CHECK(std::abs(comps[0].a_points[0]) <= 1e-6);
}

TEST_CASE("too-coarse resolution is reported") {
    // window offset so one cell center lands exactly on 0; |z^2| < 1e-4 marks
    // only that cell (neighbors sit at distance 0.05, |z^2| = 2.5e-3)
    const Window w{{-0.025, -0.025}, 2.0, 2.0, 0.05};
    const auto sq = EntireFunctionSpec::polynomial({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    CHECK_THROWS_AS(sublevel_components(sq, {0.0, 0.0}, LevelRadius::linear(1e-4), w), error);
}

TEST_CASE("component ladder: exp over 0 nests with empty a-points") {
    const Window w = Window::square(20.0, 0.1);
    auto ladder = component_ladder(EntireFunctionSpec::exp_fn(), {0.0, 0.0},
                                   {LevelRadius::linear(0.5), LevelRadius::linear(0.1),
                                    LevelRadius::linear(0.02)},
                                   w);
    REQUIRE(ladder.roots().size() == 1);
    const auto chain = ladder.deepest_chain(ladder.roots()[0]);
    REQUIRE(chain.size() == 3);
    for (int id : chain) {
        CHECK(ladder.nodes[id].component.a_points.empty());
        CHECK(ladder.nodes[id].component.touches_window_boundary);
    }
    // nesting invariant
    for (size_t i = 1; i < chain.size(); ++i)
        CHECK(cells_subset(ladder.nodes[chain[i]].component.cells,
                           ladder.nodes[chain[i - 1]].component.cells));

    const auto rep = classify_singularity(ladder, chain);
    CHECK(rep.classification == SingularityClass::DirectCandidate);
    CHECK_FALSE(rep.splitting_detected);
}

TEST_CASE("component ladder: sinc over 0 is an indirect candidate") {
    const Window w = Window::square(15.0, 0.02);
    auto ladder = component_ladder(EntireFunctionSpec::sinc(), {0.0, 0.0},
                                   {LevelRadius::linear(0.3), LevelRadius::linear(0.1),
                                    LevelRadius::linear(0.03)},
                                   w);
    // every node on every chain carries a-points (zeros k pi)
    for (const auto& node : ladder.nodes) CHECK_FALSE(node.component.a_points.empty());

    std::vector<int> chain;
    for (int root : ladder.roots()) {
        auto c = ladder.deepest_chain(root);
        if (c.size() > chain.size()) chain = std::move(c);
    }
    REQUIRE(chain.size() == 3);
    const auto rep = classify_singularity(ladder, chain);
    CHECK(rep.classification == SingularityClass::IndirectCandidate);

    // nesting invariant across the whole forest
    for (const auto& node : ladder.nodes) {
        if (node.parent < 0) continue;
        CHECK(cells_subset(node.component.cells, ladder.nodes[node.parent].component.cells));
    }

    // root a-points include +-pi..+-4pi
    std::vector<cplx> root_points;
    for (int root : ladder.roots())
        for (const cplx& p : ladder.nodes[root].component.a_points) root_points.push_back(p);
    for (int k = 1; k <= 4; ++k) {
        CHECK(has_point_near(root_points, {k * M_PI, 0.0}, 1e-8));
        CHECK(has_point_near(root_points, {-k * M_PI, 0.0}, 1e-8));
    }
}

TEST_CASE("tower ladder splits while staying direct") {
    const Window w = Window::square(40.0, 0.2);
    auto ladder = component_ladder(EntireFunctionSpec::dyadic_tower(), {0.0, 0.0},
                                   {LevelRadius::log(-10.0), LevelRadius::log(-300.0)}, w);
    bool split_on_first_rung = false;
    for (const auto& node : ladder.nodes) {
        if (node.radius_index == 0 && node.children.size() >= 2) split_on_first_rung = true;
        CHECK(node.component.a_points.empty()); // the tower omits 0
    }
    CHECK(split_on_first_rung);

    std::vector<int> chain;
    for (int root : ladder.roots()) {
        auto c = ladder.deepest_chain(root);
        if (c.size() > chain.size()) chain = std::move(c);
    }
    const auto rep = classify_singularity(ladder, chain);
    CHECK(rep.classification == SingularityClass::DirectCandidate);
}

TEST_CASE("determinism incl. threaded row fill") {
    const Window w{{0.0, 0.0}, 5.0, 10.0, 0.05};
    auto a = sublevel_components(EntireFunctionSpec::exp_fn(), {1.0, 0.0},
                                 LevelRadius::linear(0.5), w, 1);
    auto b = sublevel_components(EntireFunctionSpec::exp_fn(), {1.0, 0.0},
                                 LevelRadius::linear(0.5), w, 4);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].cells == b[i].cells);
        CHECK(a[i].sample_point == b[i].sample_point);
        CHECK(a[i].a_points.size() == b[i].a_points.size());
    }
}

TEST_CASE("refinement stability for the exp disc fixture") {
    int prev = 0;
    for (double res : {0.2, 0.1, 0.05, 0.025}) {
        const Window w{{0.0, 0.0}, 5.0, 10.0, res};
        const int n = (int)sublevel_components(EntireFunctionSpec::exp_fn(), {1.0, 0.0},
                                               LevelRadius::linear(0.5), w)
                          .size();
        CHECK(n >= prev);
        if (res <= 0.05) CHECK(n == 3);
        prev = n;
    }
}

TEST_CASE("boundary cycles") {
    // exp component of |e^z - 1| < 1/2 around 0 is simply connected
    const Window w{{0.0, 0.0}, 5.0, 10.0, 0.05};
    auto comps = sublevel_components(EntireFunctionSpec::exp_fn(), {1.0, 0.0},
                                     LevelRadius::linear(0.5), w);
    REQUIRE(comps.size() == 3);
    CHECK(boundary_cycles(comps[1], w) == 1);

    // z^2 component around 0
    const Window w2 = Window::square(2.0, 0.01);
    const auto sq = EntireFunctionSpec::polynomial({{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
    auto c2 = sublevel_components(sq, {0.0, 0.0}, LevelRadius::linear(0.01), w2);
    REQUIRE(c2.size() == 1);
    CHECK(boundary_cycles(c2[0], w2) == 1);

    // synthetic annulus fixture: ring of cells with a hole
    SublevelComponent ring;
    const Window w3 = Window::square(10.0, 0.5); // 40 x 40 grid
    const int nx = w3.nx();
    for (int iy = 10; iy <= 20; ++iy)
        for (int ix = 10; ix <= 20; ++ix) {
            const bool hole = (ix > 13 && ix < 17 && iy > 13 && iy < 17);
            if (!hole) ring.cells.push_back(iy * nx + ix);
        }
    ring.cell_count = (int)ring.cells.size();
    CHECK(boundary_cycles(ring, w3) == 2);

    // touching the window boundary is rejected
    SublevelComponent edge;
    edge.touches_window_boundary = true;
    edge.cells = {0, 1};
    edge.cell_count = 2;
    CHECK_THROWS_AS(boundary_cycles(edge, w3), error);
}

TEST_CASE("disconnectedness witness for exp") {
    const auto exp_spec = EntireFunctionSpec::exp_fn();
    const Window tall{{0.0, 0.0}, 5.0, 10.0, 0.05};
    auto res = disconnectedness_check(exp_spec, {0.0, 0.0}, {1.0, 0.0}, 0.5, tall);
    CHECK(res.component_count == 3);
    CHECK(res.verdict == DisconnectednessVerdict::DisconnectedWitnessed);

    const Window taller{{0.0, 0.0}, 5.0, 30.0, 0.05};
    res = disconnectedness_check(exp_spec, {0.0, 0.0}, {1.0, 0.0}, 0.5, taller);
    CHECK(res.component_count == 9);

    const Window small = Window::square(2.0, 0.05);
    res = disconnectedness_check(exp_spec, {0.0, 0.0}, {1.0, 0.0}, 0.5, small);
    CHECK(res.component_count == 1);
    CHECK(res.verdict == DisconnectednessVerdict::Inconclusive);

    // the disc must avoid a
    CHECK_THROWS_AS(disconnectedness_check(exp_spec, {1.2, 0.0}, {1.0, 0.0}, 0.5, small), error);
}

TEST_CASE("window plumbing") {
    Window w = Window::square(10.0, 0.5);
    CHECK(w.nx() == 40);
    CHECK(w.ny() == 40);
    auto c = w.locate({0.01, 0.01});
    REQUIRE(c.has_value());
    CHECK(w.cell_center(c->first, c->second).real() == doctest::Approx(0.25));
    CHECK_FALSE(w.locate({11.0, 0.0}).has_value());
    Window bad = Window::square(1.0, 0.5);
    CHECK_THROWS_AS(bad.validate(), error);
}
