#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "gmcpos/log.hpp"
#include "gmcpos/occupancy_grid.hpp"
#include "gmcpos/raw_graph.hpp"
#include "gmcpos/skeleton.hpp"

namespace gmcpos {

namespace detail {

// Offsets in ascending (dr, dc) order; iteration order fixes every tie-break.
inline constexpr int adj_dr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
inline constexpr int adj_dc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

/// Skeleton cells as a graph: 4-steps always, diagonal steps only where no
/// orthogonal skeleton bridge exists and both bridge cells are Free (a
/// diagonal squeeze between obstacle corners is not a traversable link).
class CellLattice {
public:
    CellLattice(const OccupancyGrid& grid, const std::vector<GridIndex>& cells)
        : grid_(grid), w_(grid.width_cells), h_(grid.height_cells),
          mask_(static_cast<std::size_t>(w_) * h_, 0) {
        for (const GridIndex& c : cells)
            mask_[index(c.row, c.col)] = 1;
    }

    bool on(int r, int c) const {
        if (r < 0 || r >= h_ || c < 0 || c >= w_) return false;
        return mask_[index(r, c)] != 0;
    }
    bool on(GridIndex c) const { return on(c.row, c.col); }

    std::vector<GridIndex> neighbors(GridIndex c) const {
        std::vector<GridIndex> out;
        out.reserve(8);
        for (int k = 0; k < 8; ++k) {
            const int nr = c.row + adj_dr[k];
            const int nc = c.col + adj_dc[k];
            if (!on(nr, nc)) continue;
            if (adj_dr[k] != 0 && adj_dc[k] != 0) {
                if (on(c.row, nc) || on(nr, c.col)) continue; // orthogonal bridge wins
                if (grid_.state(c.row, nc) != CellState::Free ||
                    grid_.state(nr, c.col) != CellState::Free)
                    continue;
            }
            out.push_back({nr, nc});
        }
        return out;
    }

    int degree(GridIndex c) const { return static_cast<int>(neighbors(c).size()); }

    double step_length(GridIndex a, GridIndex b) const {
        const bool diag = a.row != b.row && a.col != b.col;
        return diag ? grid_.resolution * std::sqrt(2.0) : grid_.resolution;
    }

    /// Deterministic BFS shortest path (fewest steps) between two cells.
    std::vector<GridIndex> bfs_path(GridIndex from, GridIndex to) const {
        if (from == to) return {from};
        std::map<GridIndex, GridIndex> parent;
        std::deque<GridIndex> queue{from};
        parent[from] = from;
        while (!queue.empty()) {
            const GridIndex cur = queue.front();
            queue.pop_front();
            for (const GridIndex& n : neighbors(cur)) {
                if (parent.count(n)) continue;
                parent[n] = cur;
                if (n == to) {
                    std::vector<GridIndex> path{to};
                    GridIndex p = cur;
                    while (!(p == from)) {
                        path.push_back(p);
                        p = parent[p];
                    }
                    path.push_back(from);
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                queue.push_back(n);
            }
        }
        throw GraphError("skeleton cells are not connected for junction merge");
    }

    const OccupancyGrid& grid() const { return grid_; }

private:
    std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * w_ + c; }

    const OccupancyGrid& grid_;
    int w_, h_;
    std::vector<std::uint8_t> mask_;
};

struct TraceEdge {
    int u = -1;
    int v = -1;
    std::vector<GridIndex> cells; // inclusive node-to-node cell path
    double arc = 0.0;
    bool alive = true;
};

inline double trace_arc(const CellLattice& lat, const std::vector<GridIndex>& cells) {
    double arc = 0.0;
    for (std::size_t i = 1; i < cells.size(); ++i)
        arc += lat.step_length(cells[i - 1], cells[i]);
    return arc;
}

/// Mutable node/edge soup used between tracing and emission.
struct Multigraph {
    std::vector<GridIndex> node_cells;
    std::vector<bool> node_alive;
    std::vector<TraceEdge> edges;

    int degree(int n) const {
        int d = 0;
        for (const TraceEdge& e : edges) {
            if (!e.alive) continue;
            if (e.u == n) ++d;
            if (e.v == n) ++d;
        }
        return d;
    }
};

inline Multigraph trace_skeleton(const CellLattice& lat, const std::vector<GridIndex>& skeleton) {
    // Node cells: junctions (degree >= 3) and endpoints (degree <= 1), plus
    // one anchor per pure-cycle component (its smallest cell).
    std::set<GridIndex> node_set;
    for (const GridIndex& c : skeleton) {
        const int d = lat.degree(c);
        if (d != 2) node_set.insert(c);
    }
    std::set<GridIndex> seen;
    for (const GridIndex& c : skeleton) {
        if (seen.count(c)) continue;
        bool has_node = false;
        GridIndex smallest = c;
        std::deque<GridIndex> queue{c};
        seen.insert(c);
        std::vector<GridIndex> comp;
        while (!queue.empty()) {
            const GridIndex cur = queue.front();
            queue.pop_front();
            comp.push_back(cur);
            if (node_set.count(cur)) has_node = true;
            if (cur < smallest) smallest = cur;
            for (const GridIndex& n : lat.neighbors(cur))
                if (seen.insert(n).second) queue.push_back(n);
        }
        if (!has_node) node_set.insert(smallest);
    }

    Multigraph mg;
    mg.node_cells.assign(node_set.begin(), node_set.end());
    mg.node_alive.assign(mg.node_cells.size(), true);
    std::map<GridIndex, int> node_id;
    for (std::size_t i = 0; i < mg.node_cells.size(); ++i)
        node_id[mg.node_cells[i]] = static_cast<int>(i);

    // Walk every corridor once; (cell, outgoing direction) pairs are consumed
    // at both ends of each trace.
    std::set<std::pair<GridIndex, GridIndex>> consumed;
    for (const GridIndex& start : mg.node_cells) {
        for (const GridIndex& first : lat.neighbors(start)) {
            if (consumed.count({start, first})) continue;
            consumed.insert({start, first});
            TraceEdge edge;
            edge.cells.push_back(start);
            GridIndex prev = start;
            GridIndex cur = first;
            while (true) {
                edge.cells.push_back(cur);
                if (node_id.count(cur)) {
                    consumed.insert({cur, prev});
                    break;
                }
                // non-node cells have exactly two lattice neighbors
                GridIndex next = cur;
                for (const GridIndex& n : lat.neighbors(cur)) {
                    if (!(n == prev)) { next = n; break; }
                }
                prev = cur;
                cur = next;
            }
            edge.u = node_id.at(start);
            edge.v = node_id.at(edge.cells.back());
            edge.arc = trace_arc(lat, edge.cells);
            mg.edges.push_back(std::move(edge));
        }
    }
    return mg;
}

/// Crossing optimization: junction nodes joined by a trace shorter than the
/// merge radius collapse into one node at their centroid, snapped onto the
/// skeleton. Traces into the cluster are spliced up to the merged cell.
inline void merge_crossings(Multigraph& mg, const CellLattice& lat, double radius) {
    if (radius <= 0.0) return;
    std::vector<int> parent(mg.node_cells.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };

    std::vector<int> deg(mg.node_cells.size(), 0);
    for (const TraceEdge& e : mg.edges) {
        if (!e.alive) continue;
        ++deg[e.u];
        ++deg[e.v];
    }
    for (const TraceEdge& e : mg.edges) {
        if (!e.alive || e.u == e.v) continue;
        if (deg[e.u] >= 3 && deg[e.v] >= 3 && e.arc < radius)
            parent[find(e.u)] = find(e.v);
    }

    std::map<int, std::vector<int>> clusters;
    for (std::size_t i = 0; i < mg.node_cells.size(); ++i)
        clusters[find(static_cast<int>(i))].push_back(static_cast<int>(i));

    for (const auto& [root, members] : clusters) {
        if (members.size() < 2) continue;
        // candidate cells: member cells plus the cells of internal traces
        std::set<GridIndex> local_cells;
        double cx = 0.0, cy = 0.0;
        const OccupancyGrid& grid = lat.grid();
        for (int m : members) {
            local_cells.insert(mg.node_cells[m]);
            const WorldPoint p = grid.cell_center(mg.node_cells[m]);
            cx += p.x;
            cy += p.y;
        }
        cx /= static_cast<double>(members.size());
        cy /= static_cast<double>(members.size());
        for (TraceEdge& e : mg.edges) {
            if (!e.alive) continue;
            if (find(e.u) == root && find(e.v) == root)
                local_cells.insert(e.cells.begin(), e.cells.end());
        }
        GridIndex merged = *local_cells.begin();
        double best = std::numeric_limits<double>::infinity();
        for (const GridIndex& c : local_cells) {
            const double d = squared_distance(grid.cell_center(c), {cx, cy});
            if (d < best) { best = d; merged = c; }
        }

        const int keep = members.front();
        mg.node_cells[keep] = merged;
        for (std::size_t m = 1; m < members.size(); ++m)
            mg.node_alive[members[m]] = false;

        for (TraceEdge& e : mg.edges) {
            if (!e.alive) continue;
            const bool u_in = find(e.u) == root;
            const bool v_in = find(e.v) == root;
            if (u_in && v_in) {
                e.alive = false;
                continue;
            }
            if (u_in && !(e.cells.front() == merged)) {
                std::vector<GridIndex> splice = lat.bfs_path(merged, e.cells.front());
                splice.insert(splice.end(), e.cells.begin() + 1, e.cells.end());
                e.cells = std::move(splice);
            }
            if (v_in && !(e.cells.back() == merged)) {
                const std::vector<GridIndex> splice = lat.bfs_path(e.cells.back(), merged);
                e.cells.insert(e.cells.end(), splice.begin() + 1, splice.end());
            }
            if (u_in) e.u = keep;
            if (v_in) e.v = keep;
            e.arc = trace_arc(lat, e.cells);
        }
    }
}

/// End-segment optimization plus pass-through cleanup: leaf corridors
/// shorter than min_length are dropped, and any node left with exactly two
/// distinct corridors is contracted out of the graph. Repeats to a fixpoint.
inline void prune_and_contract(Multigraph& mg, const CellLattice& lat, double min_length) {
    bool changed = true;
    while (changed) {
        changed = false;

        for (TraceEdge& e : mg.edges) {
            if (!e.alive || e.u == e.v || e.arc >= min_length) continue;
            const int du = mg.degree(e.u);
            const int dv = mg.degree(e.v);
            if ((du == 1) == (dv == 1)) continue; // keep isolated segments
            e.alive = false;
            const int leaf = du == 1 ? e.u : e.v;
            mg.node_alive[leaf] = false;
            changed = true;
        }

        for (std::size_t n = 0; n < mg.node_cells.size(); ++n) {
            if (!mg.node_alive[n] || mg.degree(static_cast<int>(n)) != 2) continue;
            int e1 = -1, e2 = -1;
            for (std::size_t i = 0; i < mg.edges.size(); ++i) {
                const TraceEdge& e = mg.edges[i];
                if (!e.alive || (e.u != static_cast<int>(n) && e.v != static_cast<int>(n))) continue;
                (e1 < 0 ? e1 : e2) = static_cast<int>(i);
            }
            if (e1 < 0 || e2 < 0) continue; // self-loop anchor: both slots on one edge
            TraceEdge& a = mg.edges[e1];
            TraceEdge& b = mg.edges[e2];

            auto oriented = [&](const TraceEdge& e, bool ending_at_n) {
                std::vector<GridIndex> cells = e.cells;
                const bool ends_at_n = e.v == static_cast<int>(n);
                if (ends_at_n != ending_at_n) std::reverse(cells.begin(), cells.end());
                return cells;
            };
            TraceEdge merged;
            merged.u = a.u == static_cast<int>(n) ? a.v : a.u;
            merged.v = b.u == static_cast<int>(n) ? b.v : b.u;
            merged.cells = oriented(a, true);
            const std::vector<GridIndex> tail = oriented(b, false);
            merged.cells.insert(merged.cells.end(), tail.begin() + 1, tail.end());
            merged.arc = trace_arc(lat, merged.cells);
            a.alive = false;
            b.alive = false;
            mg.node_alive[n] = false;
            mg.edges.push_back(std::move(merged));
            changed = true;
        }
    }
}

/// True when the straight segment between two cell centers, sampled at
/// quarter-resolution steps, stays on Free cells.
inline bool chord_is_free(const OccupancyGrid& grid, GridIndex a, GridIndex b) {
    const WorldPoint pa = grid.cell_center(a);
    const WorldPoint pb = grid.cell_center(b);
    const double len = euclidean(pa, pb);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / (grid.resolution / 4.0))));
    for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const WorldPoint p{pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)};
        if (grid.state(grid.cell_at(p)) != CellState::Free) return false;
    }
    return true;
}

} // namespace detail

/// Build the skeleton graph: nodes at junctions and endpoints, traced
/// corridors as edges, crossing and end-segment optimization, and
/// subdivision so consecutive nodes sit at most segment_length apart.
/// Only the largest connected component survives.
inline RawGraph build_raw_graph(const OccupancyGrid& grid, const std::vector<GridIndex>& skeleton,
                                const SkeletonParams& params) {
    if (skeleton.empty())
        throw NoSkeletonError("no skeleton: cannot build a graph from zero cells");

    const detail::CellLattice lat(grid, skeleton);
    detail::Multigraph mg = detail::trace_skeleton(lat, skeleton);
    detail::merge_crossings(mg, lat, params.crossing_merge_radius);
    detail::prune_and_contract(mg, lat, params.end_segment_min_length);

    // --- subdivision and emission -----------------------------------------
    std::set<GridIndex> final_cells;
    std::set<std::pair<GridIndex, GridIndex>> used_pairs;
    std::vector<std::pair<GridIndex, GridIndex>> cell_edges;

    auto norm_pair = [](GridIndex a, GridIndex b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    };

    for (std::size_t n = 0; n < mg.node_cells.size(); ++n)
        if (mg.node_alive[n] && mg.degree(static_cast<int>(n)) == 0)
            final_cells.insert(mg.node_cells[n]); // isolated node, kept for component filter

    for (const detail::TraceEdge& e : mg.edges) {
        if (!e.alive) continue;
        const std::vector<GridIndex>& t = e.cells;
        const std::size_t m = t.size() - 1;
        std::vector<double> cum(t.size(), 0.0);
        for (std::size_t i = 1; i < t.size(); ++i)
            cum[i] = cum[i - 1] + lat.step_length(t[i - 1], t[i]);
        const double total = cum[m];

        int k = std::max(1, static_cast<int>(std::ceil(total / params.segment_length - 1e-9)));
        if (e.u == e.v) k = std::max(k, 3);

        auto nearest_index = [&](double target, std::size_t lo, std::size_t hi) {
            std::size_t best = lo;
            double err = std::abs(cum[lo] - target);
            for (std::size_t i = lo + 1; i <= hi; ++i) {
                const double d = std::abs(cum[i] - target);
                if (d < err) { err = d; best = i; }
            }
            return best;
        };

        std::vector<std::size_t> bounds;
        for (int j = 0; j <= k; ++j) {
            const std::size_t idx = nearest_index(total * j / k, 0, m);
            if (bounds.empty() || idx > bounds.back()) bounds.push_back(idx);
        }
        if (bounds.back() != m) bounds.push_back(m);

        // refine: keep every piece within segment_length and its chord in
        // free space; split pieces at their arc midpoint until both hold
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
                const std::size_t i0 = bounds[i];
                const std::size_t i1 = bounds[i + 1];
                if (i1 - i0 < 2) continue;
                const bool too_long = cum[i1] - cum[i0] > params.segment_length + 1e-9;
                if (!too_long && detail::chord_is_free(grid, t[i0], t[i1])) continue;
                const std::size_t mid = nearest_index((cum[i0] + cum[i1]) / 2.0, i0 + 1, i1 - 1);
                bounds.insert(bounds.begin() + static_cast<std::ptrdiff_t>(i) + 1, mid);
                changed = true;
                break;
            }
        }

        // emit pieces, splitting any duplicate undirected pair
        std::function<void(std::size_t, std::size_t)> emit = [&](std::size_t i0, std::size_t i1) {
            if (t[i0] == t[i1]) return; // degenerate spliced loop
            const auto key = norm_pair(t[i0], t[i1]);
            if (used_pairs.count(key)) {
                if (i1 - i0 >= 2) {
                    const std::size_t mid = nearest_index((cum[i0] + cum[i1]) / 2.0, i0 + 1, i1 - 1);
                    emit(i0, mid);
                    emit(mid, i1);
                } else {
                    log::warn("dropping duplicate single-step edge in raw graph");
                }
                return;
            }
            used_pairs.insert(key);
            final_cells.insert(t[i0]);
            final_cells.insert(t[i1]);
            cell_edges.emplace_back(t[i0], t[i1]);
        };
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
            emit(bounds[i], bounds[i + 1]);
    }

    // --- largest connected component ---------------------------------------
    std::vector<GridIndex> cells(final_cells.begin(), final_cells.end());
    std::map<GridIndex, int> id;
    for (std::size_t i = 0; i < cells.size(); ++i) id[cells[i]] = static_cast<int>(i);
    std::vector<std::vector<int>> adj(cells.size());
    for (const auto& [a, b] : cell_edges) {
        adj[id[a]].push_back(id[b]);
        adj[id[b]].push_back(id[a]);
    }
    std::vector<int> comp(cells.size(), -1);
    int n_comp = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (comp[i] >= 0) continue;
        std::deque<int> queue{static_cast<int>(i)};
        comp[i] = n_comp;
        while (!queue.empty()) {
            const int cur = queue.front();
            queue.pop_front();
            for (int nxt : adj[cur])
                if (comp[nxt] < 0) {
                    comp[nxt] = n_comp;
                    queue.push_back(nxt);
                }
        }
        ++n_comp;
    }
    std::vector<int> comp_size(n_comp, 0);
    for (int c : comp) ++comp_size[c];
    const int keep = static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());
    if (n_comp > 1)
        log::warn("raw graph: dropping %d smaller component(s)", n_comp - 1);

    RawGraph out;
    out.dropped_components = n_comp - 1;
    std::vector<int> remap(cells.size(), -1);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (comp[i] != keep) continue;
        remap[i] = static_cast<int>(out.nodes.size());
        const GridIndex c = cells[i];
        out.nodes.push_back({(c.col + 0.5) * grid.resolution,
                             (grid.height_cells - 1 - c.row + 0.5) * grid.resolution});
    }
    for (const auto& [a, b] : cell_edges) {
        const int i = remap[id[a]];
        const int j = remap[id[b]];
        if (i < 0 || j < 0) continue;
        out.edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
}

/// Full distillation pipeline: clearance field, skeleton, graph.
inline RawGraph distill_graph(const OccupancyGrid& grid, const SkeletonParams& params) {
    const ClearanceField field = distance_transform(grid);
    const std::vector<GridIndex> skeleton = extract_skeleton(field, params);
    return build_raw_graph(grid, skeleton, params);
}

} // namespace gmcpos
