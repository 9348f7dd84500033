#include "invbranch/components.hpp"
#include "invbranch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

namespace invbranch {

void Window::validate() const {
    if (!(resolution > 0.0)) throw error(errc::precondition, "window resolution must be positive");
    if (half_width < 10.0 * resolution || half_height < 10.0 * resolution)
        throw error(errc::precondition, "window half-extents must be >= 10 * resolution");
}

int Window::nx() const { return std::max(1, (int)std::floor(2.0 * half_width / resolution + 0.5)); }
int Window::ny() const { return std::max(1, (int)std::floor(2.0 * half_height / resolution + 0.5)); }

cplx Window::cell_center(int ix, int iy) const {
    return center + cplx((ix + 0.5) * resolution - half_width, (iy + 0.5) * resolution - half_height);
}

bool Window::contains(cplx z) const {
    const cplx d = z - center;
    return std::abs(d.real()) <= half_width && std::abs(d.imag()) <= half_height;
}

std::optional<std::pair<int, int>> Window::locate(cplx z) const {
    const cplx d = z - center;
    const int ix = (int)std::floor((d.real() + half_width) / resolution);
    const int iy = (int)std::floor((d.imag() + half_height) / resolution);
    if (ix < 0 || iy < 0 || ix >= nx() || iy >= ny()) return std::nullopt;
    return std::make_pair(ix, iy);
}

namespace detail {

void fill_rows(int ny, int threads, const std::function<void(int)>& row_fn) {
    if (threads <= 0) {
        threads = (int)std::thread::hardware_concurrency();
        if (threads <= 0) threads = 1;
        threads = std::min(threads, 8);
    }
    threads = std::min(threads, ny);
    if (threads <= 1) {
        for (int iy = 0; iy < ny; ++iy) row_fn(iy);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            for (int iy = t; iy < ny; iy += threads) row_fn(iy);
        });
    }
    for (auto& th : pool) th.join();
}

// Two-pass union-find labeling, 4-connectivity.  Deterministic: final labels
// are assigned in order of each component's first row-major cell.
std::vector<int32_t> label_components(const std::vector<uint8_t>& marked, int nx, int ny,
                                      int* n_components) {
    std::vector<int32_t> label((size_t)nx * ny, -1);
    std::vector<int32_t> parent;
    parent.reserve(1024);

    auto find = [&](int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](int32_t a, int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b); // keep the smaller id as root
        parent[a] = b;
    };

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const size_t idx = (size_t)iy * nx + ix;
            if (!marked[idx]) continue;
            const int32_t left = (ix > 0 && marked[idx - 1]) ? label[idx - 1] : -1;
            const int32_t down = (iy > 0 && marked[idx - nx]) ? label[idx - nx] : -1;
            if (left < 0 && down < 0) {
                const int32_t fresh = (int32_t)parent.size();
                parent.push_back(fresh);
                label[idx] = fresh;
            } else if (left >= 0 && down >= 0) {
                label[idx] = std::min(find(left), find(down));
                unite(left, down);
            } else {
                label[idx] = find(left >= 0 ? left : down);
            }
        }
    }

    // Relabel roots to 0..n-1 in order of first appearance (row-major).
    std::vector<int32_t> compact(parent.size(), -1);
    int32_t next = 0;
    for (size_t idx = 0; idx < label.size(); ++idx) {
        if (label[idx] < 0) continue;
        const int32_t root = find(label[idx]);
        if (compact[root] < 0) compact[root] = next++;
        label[idx] = compact[root];
    }
    if (n_components) *n_components = next;
    return label;
}

} // namespace detail

namespace {

// Newton refinement of a preimage of a.  Requires genuine convergence
// (shrinking steps), not just a small residual, so that asymptotic values
// (e.g. exp -> 0) are not mistaken for a-points.
std::optional<cplx> refine_a_point(const EntireFunctionSpec& spec, cplx a, cplx seed,
                                   double step_cap) {
    cplx z = seed;
    for (int it = 0; it < 60; ++it) {
        EvalResult e = eval_fn(spec, z);
        if (e.overflow) return std::nullopt;
        const cplx res = e.value - a;
        if (std::abs(e.derivative) < 1e-300) return std::nullopt;
        const cplx step = res / e.derivative;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
        if (std::abs(step) > step_cap) return std::nullopt;
        z -= step;
        if (std::abs(step) <= 1e-12 * (1.0 + std::abs(z))) {
            EvalResult chk = eval_fn(spec, z);
            if (std::abs(chk.value - a) <= 1e-10) return z;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::vector<cplx> dedup_sorted(std::vector<cplx> pts, double tol) {
    std::sort(pts.begin(), pts.end(), [](cplx u, cplx v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    std::vector<cplx> out;
    for (const cplx& p : pts) {
        bool dup = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (p.real() - it->real() > tol) break;
            if (std::abs(p - *it) <= tol) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(p);
    }
    return out;
}

struct GridMark {
    std::vector<uint8_t> marked;
    std::vector<double> dist; // |f(center) - a|; NaN where not evaluable (log mode)
};

GridMark mark_sublevel(const EntireFunctionSpec& spec, cplx a, LevelRadius r, const Window& window,
                       int threads) {
    window.validate();
    const int nx = window.nx(), ny = window.ny();
    GridMark gm;
    gm.marked.assign((size_t)nx * ny, 0);
    const bool log_mode = r.is_log;
    if (log_mode) {
        if (spec.kind != FunctionKind::DyadicTower)
            throw error(errc::precondition, "log-domain level radius requires the dyadic tower");
        if (a != cplx(0.0, 0.0))
            throw error(errc::precondition, "dyadic tower sublevel sets are tracked over a = 0");
        const SignedLogReal thr = SignedLogReal::from_value(r.value); // r.value is ln(radius)
        detail::fill_rows(ny, threads, [&](int iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const cplx c = window.cell_center(ix, iy);
                const auto re_g = signed_log_re_g(c, spec.truncation_tol_log);
                if (!re_g) continue; // degenerate: sign unresolvable, leave unmarked
                if (slr_less(*re_g, thr)) gm.marked[(size_t)iy * nx + ix] = 1;
            }
        });
    } else {
        if (!(r.value > 0.0)) throw error(errc::precondition, "level radius must be positive");
        gm.dist.assign((size_t)nx * ny, std::numeric_limits<double>::quiet_NaN());
        detail::fill_rows(ny, threads, [&](int iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const cplx c = window.cell_center(ix, iy);
                EvalResult e = eval_fn(spec, c);
                if (e.overflow) continue;
                const double d = std::abs(e.value - a);
                gm.dist[(size_t)iy * nx + ix] = d;
                if (d < r.value) gm.marked[(size_t)iy * nx + ix] = 1;
            }
        });
    }
    return gm;
}

} // namespace

std::vector<SublevelComponent> sublevel_components(const EntireFunctionSpec& spec, cplx a,
                                                   LevelRadius r, const Window& window,
                                                   int threads) {
    const int nx = window.nx(), ny = window.ny();
    GridMark gm = mark_sublevel(spec, a, r, window, threads);

    int n_comp = 0;
    std::vector<int32_t> label = detail::label_components(gm.marked, nx, ny, &n_comp);

    std::vector<SublevelComponent> comps(n_comp);
    for (int i = 0; i < n_comp; ++i) comps[i].id = i;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const size_t idx = (size_t)iy * nx + ix;
            if (label[idx] < 0) continue;
            SublevelComponent& c = comps[label[idx]];
            if (c.cell_count == 0) c.sample_point = window.cell_center(ix, iy);
            c.cell_count++;
            c.cells.push_back((int32_t)idx);
            if (ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1) c.touches_window_boundary = true;
        }
    }

    for (const SublevelComponent& c : comps) {
        if (c.cell_count < 4)
            throw error(errc::resolution_too_coarse,
                        "component with fewer than 4 cells; refine the window resolution");
    }

    // a-points: local minima of |f - a| among marked cells, Newton-refined.
    // The dyadic tower omits 0 and is tracked over a = 0 only, so it has none.
    if (!gm.dist.empty()) {
        std::vector<cplx> refined;
        std::vector<int32_t> owner;
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const size_t idx = (size_t)iy * nx + ix;
                if (!gm.marked[idx]) continue;
                const double d0 = gm.dist[idx];
                bool is_min = true;
                for (int dy = -1; dy <= 1 && is_min; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int jx = ix + dx, jy = iy + dy;
                        if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
                        const double dn = gm.dist[(size_t)jy * nx + jx];
                        if (!std::isnan(dn) && dn < d0) {
                            is_min = false;
                            break;
                        }
                    }
                }
                if (!is_min) continue;
                auto z = refine_a_point(spec, a, window.cell_center(ix, iy), 4.0 * window.resolution);
                if (!z) continue;
                int32_t who = label[idx];
                if (auto cell = window.locate(*z)) {
                    const int32_t l2 = label[(size_t)cell->second * nx + cell->first];
                    if (l2 >= 0) who = l2;
                }
                refined.push_back(*z);
                owner.push_back(who);
            }
        }
        for (int i = 0; i < n_comp; ++i) {
            std::vector<cplx> mine;
            for (size_t j = 0; j < refined.size(); ++j)
                if (owner[j] == i) mine.push_back(refined[j]);
            comps[i].a_points = dedup_sorted(std::move(mine), 1e-6);
        }
    }
    return comps;
}

ComponentLadder component_ladder(const EntireFunctionSpec& spec, cplx a,
                                 const std::vector<LevelRadius>& radii, const Window& window,
                                 int threads) {
    if (radii.empty()) throw error(errc::precondition, "radius ladder must be nonempty");
    for (size_t i = 0; i + 1 < radii.size(); ++i) {
        if (radii[i].is_log != radii[i + 1].is_log)
            throw error(errc::precondition, "radius ladder must not mix log and linear levels");
        if (!(radii[i + 1].value < radii[i].value))
            throw error(errc::precondition, "radius ladder must be strictly decreasing");
    }

    ComponentLadder ladder;
    ladder.radii = radii;
    ladder.window = window;

    std::vector<std::vector<int>> level_nodes; // per radius, node index per component
    for (size_t ri = 0; ri < radii.size(); ++ri) {
        auto comps = sublevel_components(spec, a, radii[ri], window, threads);
        std::vector<int> ids;
        for (auto& c : comps) {
            ComponentLadder::Node node;
            node.radius_index = (int)ri;
            node.component = std::move(c);
            ladder.nodes.push_back(std::move(node));
            ids.push_back((int)ladder.nodes.size() - 1);
        }
        level_nodes.push_back(std::move(ids));
    }

    // Containment linking: a child's first cell is marked at the parent radius.
    const int nx = window.nx(), ny = window.ny();
    for (size_t ri = 1; ri < radii.size(); ++ri) {
        std::vector<int32_t> cell_to_parent((size_t)nx * ny, -1);
        for (int id : level_nodes[ri - 1])
            for (int32_t cell : ladder.nodes[id].component.cells) cell_to_parent[cell] = id;
        for (int id : level_nodes[ri]) {
            const int32_t first = ladder.nodes[id].component.cells.front();
            const int parent = cell_to_parent[first];
            if (parent < 0)
                throw error(errc::resolution_too_coarse,
                            "child component not contained in any parent at the larger radius");
            ladder.nodes[id].parent = parent;
            ladder.nodes[parent].children.push_back(id);
        }
    }
    return ladder;
}

std::vector<int> ComponentLadder::roots() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].parent < 0 && nodes[i].radius_index == 0) out.push_back((int)i);
    return out;
}

std::vector<int> ComponentLadder::chain_to(int node) const {
    std::vector<int> chain;
    for (int cur = node; cur >= 0; cur = nodes[cur].parent) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

std::vector<int> ComponentLadder::deepest_chain(int root) const {
    int best = root;
    // BFS for the deepest descendant, preferring the earliest node at each depth.
    std::vector<int> frontier{root};
    while (!frontier.empty()) {
        best = frontier.front();
        std::vector<int> next;
        for (int id : frontier)
            for (int ch : nodes[id].children) next.push_back(ch);
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }
    return chain_to(best);
}

const char* singularity_class_name(SingularityClass c) {
    switch (c) {
        case SingularityClass::DirectCandidate: return "direct_candidate";
        case SingularityClass::IndirectCandidate: return "indirect_candidate";
        case SingularityClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

SingularityReport classify_singularity(const ComponentLadder& ladder,
                                       const std::vector<int>& chain) {
    if (chain.empty()) throw error(errc::precondition, "empty ladder chain");
    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        if (ladder.nodes[chain[i + 1]].parent != chain[i])
            throw error(errc::precondition, "chain is not a parent-child path in the ladder");
    }

    SingularityReport rep;
    size_t first_empty = chain.size();
    bool all_nonempty = true;
    for (size_t i = 0; i < chain.size(); ++i) {
        const bool empty = ladder.nodes[chain[i]].component.a_points.empty();
        if (empty) {
            all_nonempty = false;
            first_empty = std::min(first_empty, i);
        }
    }
    bool empty_onward = first_empty < chain.size();
    for (size_t i = first_empty; i < chain.size(); ++i)
        if (!ladder.nodes[chain[i]].component.a_points.empty()) empty_onward = false;

    if (empty_onward)
        rep.classification = SingularityClass::DirectCandidate;
    else if (all_nonempty)
        rep.classification = SingularityClass::IndirectCandidate;
    else
        rep.classification = SingularityClass::Inconclusive;

    std::string w;
    for (size_t i = 0; i < chain.size(); ++i) {
        const auto& node = ladder.nodes[chain[i]];
        if (node.children.size() >= 2) rep.splitting_detected = true;
        if (i) w += " -> ";
        w += "rung " + std::to_string(node.radius_index) + " comp#" +
             std::to_string(node.component.id) + " (cells " + std::to_string(node.component.cell_count) +
             ", a-points " + std::to_string(node.component.a_points.size()) + ", children " +
             std::to_string(node.children.size()) +
             (node.component.touches_window_boundary ? ", clipped" : "") + ")";
    }
    rep.witness = w;
    return rep;
}

int boundary_cycles(const SublevelComponent& component, const Window& window) {
    if (component.touches_window_boundary)
        throw error(errc::touches_boundary, "component touches the window boundary");
    const int nx = window.nx();

    // Bounding box, padded by one cell of background.
    int min_x = nx, max_x = -1, min_y = 1 << 30, max_y = -1;
    for (int32_t cell : component.cells) {
        const int ix = cell % nx, iy = cell / nx;
        min_x = std::min(min_x, ix);
        max_x = std::max(max_x, ix);
        min_y = std::min(min_y, iy);
        max_y = std::max(max_y, iy);
    }
    const int w = max_x - min_x + 1, h = max_y - min_y + 1;
    std::vector<uint8_t> mask((size_t)w * h, 0);
    for (int32_t cell : component.cells)
        mask[(size_t)(cell / nx - min_y) * w + (cell % nx - min_x)] = 1;
    auto filled = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return false;
        return mask[(size_t)y * w + x] != 0;
    };

    // Directed boundary edges on the vertex grid, marked cell on the left.
    // dir: 0=+x (below cell row y), 1=+y, 2=-x, 3=-y.
    // Edge (x, y, dir) starts at vertex (x, y).
    auto edge_exists = [&](int x, int y, int dir) {
        switch (dir) {
            case 0: return filled(x, y) && !filled(x, y - 1);         // bottom of cell (x,y)
            case 1: return filled(x - 1, y) && !filled(x, y);         // right side of cell (x-1,y)
            case 2: return filled(x - 1, y - 1) && !filled(x - 1, y); // top of cell (x-1,y-1)
            case 3: return filled(x, y - 1) && !filled(x - 1, y - 1); // left side of cell (x,y-1)
        }
        return false;
    };
    auto edge_end = [](int x, int y, int dir, int* ex, int* ey) {
        const int dx[4] = {1, 0, -1, 0}, dy[4] = {0, 1, 0, -1};
        *ex = x + dx[dir];
        *ey = y + dy[dir];
    };

    std::vector<uint8_t> visited((size_t)(w + 1) * (h + 1) * 4, 0);
    auto vid = [&](int x, int y, int dir) { return ((size_t)y * (w + 1) + x) * 4 + dir; };

    int cycles = 0;
    for (int y = 0; y <= h; ++y) {
        for (int x = 0; x <= w; ++x) {
            for (int d = 0; d < 4; ++d) {
                if (!edge_exists(x, y, d) || visited[vid(x, y, d)]) continue;
                // Trace one closed contour.
                int cx = x, cy = y, cd = d;
                while (!visited[vid(cx, cy, cd)]) {
                    visited[vid(cx, cy, cd)] = 1;
                    int ex, ey;
                    edge_end(cx, cy, cd, &ex, &ey);
                    // Prefer the sharpest left turn: keeps contours hugging the
                    // marked region, so diagonal touches pinch (4-connectivity).
                    int nd = -1;
                    for (int turn : {1, 0, 3}) { // left, straight, right
                        const int cand = (cd + turn) % 4;
                        if (edge_exists(ex, ey, cand)) {
                            nd = cand;
                            break;
                        }
                    }
                    if (nd < 0) break; // cannot happen on a well-formed mask
                    cx = ex;
                    cy = ey;
                    cd = nd;
                }
                cycles++;
            }
        }
    }
    return cycles;
}

DisconnectednessResult disconnectedness_check(const EntireFunctionSpec& spec, cplx a,
                                              cplx disc_center, double disc_radius,
                                              const Window& window, int threads) {
    if (!(std::abs(disc_center - a) > disc_radius))
        throw error(errc::precondition, "disc must not contain the omitted point a");
    DisconnectednessResult res;
    res.components = sublevel_components(spec, disc_center, LevelRadius::linear(disc_radius),
                                         window, threads);
    res.component_count = (int)res.components.size();
    res.verdict = res.component_count >= 2 ? DisconnectednessVerdict::DisconnectedWitnessed
                                           : DisconnectednessVerdict::Inconclusive;
    return res;
}

std::vector<cplx> find_a_points(const EntireFunctionSpec& spec, cplx a, const Window& window) {
    window.validate();
    if (spec.kind == FunctionKind::DyadicTower && a == cplx(0.0, 0.0))
        return {}; // the tower omits 0
    const int nx = window.nx(), ny = window.ny();
    std::vector<double> dist((size_t)nx * ny, std::numeric_limits<double>::quiet_NaN());
    detail::fill_rows(ny, 0, [&](int iy) {
        for (int ix = 0; ix < nx; ++ix) {
            EvalResult e = eval_fn(spec, window.cell_center(ix, iy));
            if (!e.overflow) dist[(size_t)iy * nx + ix] = std::abs(e.value - a);
        }
    });

    const double coarse = 0.5 * (1.0 + std::abs(a));
    std::vector<cplx> found;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double d0 = dist[(size_t)iy * nx + ix];
            if (std::isnan(d0) || d0 >= coarse) continue;
            bool strict_min = true;
            for (int dy = -1; dy <= 1 && strict_min; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int jx = ix + dx, jy = iy + dy;
                    if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
                    const double dn = dist[(size_t)jy * nx + jx];
                    // ties broken toward the first row-major cell
                    if (!std::isnan(dn) &&
                        (dn < d0 || (dn == d0 && (size_t)jy * nx + jx < (size_t)iy * nx + ix))) {
                        strict_min = false;
                        break;
                    }
                }
            }
            if (!strict_min) continue;
            auto z = refine_a_point(spec, a, window.cell_center(ix, iy), 4.0 * window.resolution);
            if (z && window.contains(*z)) found.push_back(*z);
        }
    }
    return dedup_sorted(std::move(found), 1e-6);
}

} // namespace invbranch
