#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "gmcpos/errors.hpp"
#include "gmcpos/geometry.hpp"

namespace gmcpos {

/// Skeleton graph in map-local coordinates: (0, 0) is the bottom-left
/// corner of the map image. The map origin offset is applied later when
/// the graph is finalized.
struct RawGraph {
    std::vector<WorldPoint> nodes;
    std::vector<std::pair<int, int>> edges; // undirected, first < second
    int dropped_components = 0;             // diagnostic, not serialized
};

inline nlohmann::json to_json(const RawGraph& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const WorldPoint& p : g.nodes) nodes.push_back({p.x, p.y});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [i, j] : g.edges) edges.push_back({i, j});
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline RawGraph raw_graph_from_json(const nlohmann::json& j) {
    RawGraph g;
    for (const auto& n : j.at("nodes"))
        g.nodes.push_back({n.at(0).get<double>(), n.at(1).get<double>()});
    for (const auto& e : j.at("edges")) {
        const int a = e.at(0).get<int>();
        const int b = e.at(1).get<int>();
        if (a < 0 || b < 0 || a >= static_cast<int>(g.nodes.size()) || b >= static_cast<int>(g.nodes.size()))
            throw GraphError("raw graph JSON: edge index out of range");
        if (a == b)
            throw GraphError("raw graph JSON: self-loop");
        g.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    return g;
}

} // namespace gmcpos
