#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gmcpos/coverage.hpp"
#include "gmcpos/errors.hpp"
#include "gmcpos/occupancy_grid.hpp"
#include "gmcpos/planner.hpp"
#include "gmcpos/roadmap.hpp"

namespace gmcpos::oracle {

/// All-pairs shortest paths by Floyd-Warshall. Deliberately separate from
/// the Dijkstra route so the two can check each other.
inline std::vector<std::vector<double>> floyd_warshall(const RoadmapGraph& g) {
    const std::size_t n = g.size();
    if (n > 512)
        throw ValidationError("floyd_warshall: guard exceeded (" + std::to_string(n) + " > 512 nodes)");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) {
        dist[i][i] = 0.0;
        for (const auto& [j, w] : g.neighbors(static_cast<int>(i)))
            dist[i][j] = std::min(dist[i][j], w);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (dist[i][k] + dist[k][j] < dist[i][j])
                    dist[i][j] = dist[i][k] + dist[k][j];
    return dist;
}

/// O(n^2) clearance reference: scan every non-Free cell plus the virtual
/// boundary ring for each free cell.
inline std::vector<double> brute_force_clearance(const OccupancyGrid& grid) {
    std::vector<double> out(grid.cell_count(), 0.0);
    for (int r = 0; r < grid.height_cells; ++r) {
        for (int c = 0; c < grid.width_cells; ++c) {
            if (grid.state(r, c) != CellState::Free) continue;
            // nearest virtual obstacle one cell beyond each border
            double best2 = std::min(std::min(r + 1, grid.height_cells - r),
                                    std::min(c + 1, grid.width_cells - c));
            best2 *= best2;
            for (int rr = 0; rr < grid.height_cells; ++rr)
                for (int cc = 0; cc < grid.width_cells; ++cc)
                    if (grid.state(rr, cc) != CellState::Free) {
                        const double d2 = static_cast<double>(rr - r) * (rr - r) +
                                          static_cast<double>(cc - c) * (cc - c);
                        best2 = std::min(best2, d2);
                    }
            out[static_cast<std::size_t>(r) * grid.width_cells + c] = std::sqrt(best2) * grid.resolution;
        }
    }
    return out;
}

/// Coverage reference: plain double loop over every universe cell and
/// every position, no rasterization windows.
inline double brute_force_acp(const OccupancyGrid& grid, const std::vector<WorldPoint>& positions,
                              const WorldPoint& operator_pos, double r, Universe universe) {
    const double r2 = r * r;
    long total = 0;
    long covered = 0;
    for (int row = 0; row < grid.height_cells; ++row) {
        for (int col = 0; col < grid.width_cells; ++col) {
            if (!in_universe(grid.state(row, col), universe)) continue;
            ++total;
            const WorldPoint cell = grid.cell_center(row, col);
            bool hit = squared_distance(cell, operator_pos) <= r2;
            for (std::size_t i = 0; i < positions.size() && !hit; ++i)
                hit = squared_distance(cell, positions[i]) <= r2;
            if (hit) ++covered;
        }
    }
    if (total == 0)
        throw ValidationError("coverage universe is empty");
    return 100.0 * static_cast<double>(covered) / static_cast<double>(total);
}

struct BestPlacement {
    double acp = 0.0;
    std::vector<int> node_indices;
};

/// Exhaustive search over all n-subsets of graph nodes for the best ACP.
/// Guards against combinatorial blowup; ties keep the lexicographically
/// smallest subset.
inline BestPlacement exhaustive_best_acp(const OccupancyGrid& grid, const RoadmapGraph& g,
                                         const WorldPoint& operator_pos, int n, double r,
                                         Universe universe = Universe::Known) {
    const int v = static_cast<int>(g.size());
    if (n < 0 || n > v)
        throw ValidationError("exhaustive_best_acp: robot count out of range");
    double combos = 1.0;
    for (int i = 0; i < n; ++i) combos = combos * (v - i) / (i + 1);
    if (combos > 2e6)
        throw ValidationError("exhaustive_best_acp: guard exceeded (C(" + std::to_string(v) + "," +
                              std::to_string(n) + ") > 2e6 subsets)");

    // pack the per-node coverage disks as bitsets over the grid
    const std::size_t words = (grid.cell_count() + 63) / 64;
    auto pack = [&](const WorldPoint& p) {
        std::vector<std::uint64_t> bits(words, 0);
        std::vector<std::uint8_t> mask(grid.cell_count(), 0);
        detail::rasterize_disk(grid, p, r, universe, mask);
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i]) bits[i / 64] |= (std::uint64_t{1} << (i % 64));
        return bits;
    };
    const std::vector<std::uint64_t> operator_bits = pack(operator_pos);
    std::vector<std::vector<std::uint64_t>> node_bits(g.size());
    for (int i = 0; i < v; ++i) node_bits[i] = pack(g.node(i));

    long total = 0;
    for (const CellState s : grid.cells)
        if (in_universe(s, universe)) ++total;
    if (total == 0)
        throw ValidationError("coverage universe is empty");

    BestPlacement best;
    best.acp = -1.0;
    std::vector<int> pick(n);
    std::vector<std::vector<std::uint64_t>> acc(n + 1);
    acc[0] = operator_bits;

    // lexicographic combination enumeration with incremental unions
    std::function<void(int, int)> recurse = [&](int depth, int start) {
        if (depth == n) {
            long covered = 0;
            for (const std::uint64_t word : acc[n]) covered += std::popcount(word);
            const double acp = 100.0 * static_cast<double>(covered) / static_cast<double>(total);
            if (acp > best.acp) {
                best.acp = acp;
                best.node_indices = pick;
            }
            return;
        }
        for (int i = start; i < v - (n - depth - 1); ++i) {
            pick[depth] = i;
            acc[depth + 1] = acc[depth];
            for (std::size_t w = 0; w < words; ++w) acc[depth + 1][w] |= node_bits[i][w];
            recurse(depth + 1, i + 1);
        }
    };
    recurse(0, 0);
    return best;
}

struct AuditReport {
    bool ok = true;
    std::vector<std::string> violations;

    void fail(const std::string& msg) {
        ok = false;
        violations.push_back(msg);
    }
};

/// Recompute the selection constraints from scratch (Floyd-Warshall paths,
/// linear nearest-node scans) and verify every non-fallback step of a
/// placement: annulus membership, spread from all prior positions,
/// maximal degree, and maximal anchor distance within the degree subset.
inline AuditReport audit_placement(const RoadmapGraph& g, const OccupancyGrid& grid,
                                   const Scenario& sc, const PlacementResult& result) {
    AuditReport report;
    const auto fw = floyd_warshall(g);

    auto nearest = [&](const WorldPoint& p) {
        int best = 0;
        double best_d = squared_distance(p, g.node(0));
        for (int i = 1; i < static_cast<int>(g.size()); ++i) {
            const double d = squared_distance(p, g.node(i));
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    };
    auto dg_node_point = [&](int v, const WorldPoint& p) {
        const int vp = nearest(p);
        return fw[v][vp] + euclidean(g.node(vp), p);
    };

    const double alpha = compute_alpha(grid, sc.robot_count);
    if (std::abs(alpha - result.alpha) > 1e-9)
        report.fail("alpha mismatch");
    if (result.positions.size() != result.node_indices.size() ||
        result.positions.size() != result.anchors.size())
        report.fail("result arrays disagree in length");
    if (!result.exhausted && static_cast<int>(result.positions.size()) != sc.robot_count)
        report.fail("placement not exhausted but short of robot_count");

    std::vector<WorldPoint> prior{sc.operator_pos};
    std::vector<int> prior_idx;

    for (std::size_t i = 0; i < result.node_indices.size(); ++i) {
        const int v = result.node_indices[i];
        const WorldPoint expected_anchor = i < 2 ? sc.operator_pos : result.positions[i - 2];
        if (!(result.anchors[i] == expected_anchor))
            report.fail("step " + std::to_string(i) + ": anchor schedule violated");
        if (!(result.positions[i] == g.node(v)))
            report.fail("step " + std::to_string(i) + ": position is not its node's coordinate");

        const bool fallback = std::find(result.fallback_steps.begin(), result.fallback_steps.end(),
                                        static_cast<int>(i)) != result.fallback_steps.end();
        if (!fallback) {
            // rebuild the candidate set for this step
            std::vector<int> candidates;
            for (int u = 0; u < static_cast<int>(g.size()); ++u) {
                if (std::find(prior_idx.begin(), prior_idx.end(), u) != prior_idx.end()) continue;
                if (!(dg_node_point(u, expected_anchor) < 2.0 * sc.coverage_radius)) continue;
                bool ok = true;
                for (const WorldPoint& s : prior)
                    if (!(dg_node_point(u, s) >= alpha)) { ok = false; break; }
                if (ok) candidates.push_back(u);
            }
            if (std::find(candidates.begin(), candidates.end(), v) == candidates.end()) {
                report.fail("step " + std::to_string(i) + ": chosen node not in recomputed candidate set");
            } else {
                int max_deg = 0;
                for (int u : candidates) max_deg = std::max(max_deg, g.degree(u));
                if (g.degree(v) != max_deg)
                    report.fail("step " + std::to_string(i) + ": chosen node is not of maximal degree");
                double max_dist = -1.0;
                for (int u : candidates)
                    if (g.degree(u) == max_deg)
                        max_dist = std::max(max_dist, dg_node_point(u, expected_anchor));
                if (dg_node_point(v, expected_anchor) < max_dist - 1e-9)
                    report.fail("step " + std::to_string(i) + ": chosen node is not furthest from anchor");
            }
        }
        prior.push_back(result.positions[i]);
        prior_idx.push_back(v);
    }
    return report;
}

} // namespace gmcpos::oracle
