#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include <json.hpp>

#include "gmcpos/errors.hpp"
#include "gmcpos/occupancy_grid.hpp"
#include "gmcpos/roadmap.hpp"

namespace gmcpos {

struct Scenario {
    WorldPoint operator_pos{};   // P
    int robot_count = 1;         // N
    double coverage_radius = 6.0;// r, meters
    std::uint64_t seed = 0;      // used by the random baseline only
};

struct PlacementResult {
    std::vector<WorldPoint> positions;  // selected robot positions, in order
    std::vector<int> node_indices;      // graph node of each position
    std::vector<WorldPoint> anchors;    // anchor used at each step: P, P, pos[0], pos[1], ...
    std::vector<int> fallback_steps;    // steps where the constraint set was empty
    double alpha = 0.0;                 // spread constraint, meters
    bool exhausted = false;             // fewer positions than requested

    nlohmann::json to_json() const {
        nlohmann::json positions_json = nlohmann::json::array();
        for (const WorldPoint& p : positions) positions_json.push_back({p.x, p.y});
        nlohmann::json anchors_json = nlohmann::json::array();
        for (const WorldPoint& p : anchors) anchors_json.push_back({p.x, p.y});
        return {{"alpha", alpha},
                {"positions", std::move(positions_json)},
                {"anchors", std::move(anchors_json)},
                {"fallback_steps", fallback_steps},
                {"node_indices", node_indices},
                {"exhausted", exhausted}};
    }
};

/// Spread constraint: the larger map side divided by the robot count.
inline double compute_alpha(const OccupancyGrid& grid, int robot_count) {
    return std::max(grid.height_m(), grid.width_m()) / robot_count;
}

/// Nodes within 2r of the anchor that keep at least alpha from every
/// previously selected position and the operator. `selected_points` must
/// contain the operator position plus all previous selections;
/// `selected_nodes` are the node indices already taken.
inline std::vector<int> candidate_set(const RoadmapGraph& g, const WorldPoint& eta,
                                      const std::vector<WorldPoint>& selected_points,
                                      const std::vector<int>& selected_nodes,
                                      double coverage_radius, double alpha) {
    std::vector<char> taken(g.size(), 0);
    for (int v : selected_nodes) taken[v] = 1;

    std::vector<int> out;
    for (int v = 0; v < static_cast<int>(g.size()); ++v) {
        if (taken[v]) continue;
        if (!(g.generalized_distance(g.node(v), eta) < 2.0 * coverage_radius)) continue;
        bool ok = true;
        for (const WorldPoint& s : selected_points) {
            if (!(g.generalized_distance(g.node(v), s) >= alpha)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(v);
    }
    return out;
}

/// Candidates whose degree equals the maximum degree among the candidates.
inline std::vector<int> max_degree_subset(const RoadmapGraph& g, const std::vector<int>& candidates) {
    if (candidates.empty())
        throw ValidationError("max_degree_subset: empty candidate set (caller must run fallback)");
    int max_deg = 0;
    for (int v : candidates) max_deg = std::max(max_deg, g.degree(v));
    std::vector<int> out;
    for (int v : candidates)
        if (g.degree(v) == max_deg) out.push_back(v);
    return out;
}

/// GMC-Pos node selection. Positions are chosen bidirectionally: the first
/// two steps anchor on the operator, step i >= 2 anchors on position i-2.
/// Each step takes the candidate furthest from its anchor among the
/// highest-degree candidates; ties break to the lowest node index.
///
/// When a step's candidate set is empty the spread constraint is halved
/// until it drops below the map resolution; if still empty, the degree
/// filter is dropped and the node maximizing the minimum distance to all
/// previous positions is taken. Such steps are recorded in fallback_steps.
inline PlacementResult select_positions(const RoadmapGraph& g, const OccupancyGrid& grid,
                                        const Scenario& sc) {
    if (!grid.contains(sc.operator_pos))
        throw ValidationError("operator position lies outside the map rectangle");
    if (sc.robot_count < 1)
        throw ValidationError("robot count must be >= 1");
    if (!(sc.coverage_radius > 0.0))
        throw ValidationError("coverage radius must be > 0");

    PlacementResult result;
    result.alpha = compute_alpha(grid, sc.robot_count);

    std::vector<WorldPoint> selected_points{sc.operator_pos};

    for (int step = 0; step < sc.robot_count; ++step) {
        const WorldPoint eta = step < 2 ? sc.operator_pos : result.positions[step - 2];

        double alpha_step = result.alpha;
        bool relaxed = false;
        std::vector<int> candidates =
            candidate_set(g, eta, selected_points, result.node_indices, sc.coverage_radius, alpha_step);
        while (candidates.empty() && alpha_step >= grid.resolution) {
            alpha_step /= 2.0;
            relaxed = true;
            candidates =
                candidate_set(g, eta, selected_points, result.node_indices, sc.coverage_radius, alpha_step);
        }

        int chosen = -1;
        if (!candidates.empty()) {
            const std::vector<int> best_degree = max_degree_subset(g, candidates);
            double best = -1.0;
            for (int v : best_degree) {
                const double d = g.generalized_distance(g.node(v), eta);
                if (d > best) {
                    best = d;
                    chosen = v;
                }
            }
        } else {
            // last resort: ignore the degree filter, maximize the minimum
            // distance to everything already placed
            relaxed = true;
            std::vector<char> taken(g.size(), 0);
            for (int v : result.node_indices) taken[v] = 1;
            double best = -1.0;
            for (int v = 0; v < static_cast<int>(g.size()); ++v) {
                if (taken[v]) continue;
                double closest = std::numeric_limits<double>::infinity();
                for (const WorldPoint& s : selected_points)
                    closest = std::min(closest, g.generalized_distance(g.node(v), s));
                if (closest > best) {
                    best = closest;
                    chosen = v;
                }
            }
        }

        if (chosen < 0) {
            result.exhausted = true;
            break;
        }
        if (relaxed) result.fallback_steps.push_back(step);
        result.anchors.push_back(eta);
        result.node_indices.push_back(chosen);
        result.positions.push_back(g.node(chosen));
        selected_points.push_back(g.node(chosen));
    }
    return result;
}

} // namespace gmcpos
