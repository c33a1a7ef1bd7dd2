#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <queue>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "gmcpos/errors.hpp"
#include "gmcpos/geometry.hpp"
#include "gmcpos/raw_graph.hpp"

namespace gmcpos {

/// Weighted connected roadmap in world coordinates. Immutable once built;
/// all queries are read-only and safe to issue concurrently.
class RoadmapGraph {
public:
    /// Apply the map-origin offset to a raw graph and weight every edge
    /// with the Euclidean distance between its endpoints.
    static RoadmapGraph finalize(const RawGraph& raw, const WorldPoint& origin) {
        if (raw.nodes.empty())
            throw GraphError("cannot finalize an empty graph");
        RoadmapGraph g;
        g.nodes_.reserve(raw.nodes.size());
        for (const WorldPoint& p : raw.nodes)
            g.nodes_.push_back({p.x + origin.x, p.y + origin.y});
        g.adjacency_.resize(g.nodes_.size());
        for (const auto& [i, j] : raw.edges) {
            if (i == j)
                throw GraphError("self-loop in raw graph");
            const double w = euclidean(g.nodes_[i], g.nodes_[j]);
            if (!(w > 0.0))
                throw GraphError("zero-length edge in raw graph");
            g.adjacency_[i].emplace_back(j, w);
            g.adjacency_[j].emplace_back(i, w);
        }
        for (auto& nbrs : g.adjacency_)
            std::sort(nbrs.begin(), nbrs.end());
        g.require_connected();
        g.build_spatial_index();
        return g;
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<WorldPoint>& nodes() const { return nodes_; }
    const WorldPoint& node(int v) const { return nodes_[v]; }
    const std::vector<std::pair<int, double>>& neighbors(int v) const { return adjacency_[v]; }
    int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

    /// Length of the shortest path between two nodes (Dijkstra, memoized
    /// per source).
    double shortest_path_length(int u, int v) const {
        return sssp(u)[v];
    }

    /// All shortest-path lengths from one source node. The memo table is
    /// guarded by a mutex; returned references stay valid because entries
    /// are never erased.
    const std::vector<double>& sssp(int source) const {
        std::scoped_lock lock(cache_->mutex);
        auto it = cache_->table.find(source);
        if (it != cache_->table.end()) return it->second;

        std::vector<double> dist(nodes_.size(), std::numeric_limits<double>::infinity());
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[source] = 0.0;
        heap.push({0.0, source});
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (const auto& [v, w] : adjacency_[u]) {
                const double nd = d + w;
                if (nd < dist[v]) {
                    dist[v] = nd;
                    heap.push({nd, v});
                }
            }
        }
        return cache_->table.emplace(source, std::move(dist)).first->second;
    }

    /// Index of the node closest to p in the Euclidean sense; ties break
    /// to the lowest index. Exhaustive below the index threshold, bucket
    /// grid above — identical answers either way.
    int nearest_node(const WorldPoint& p) const {
        if (buckets_.empty())
            return nearest_linear(p, 0, static_cast<int>(nodes_.size()));
        return nearest_indexed(p);
    }

    /// Generalized graph-based distance between two arbitrary points: the
    /// Euclidean hops to each point's nearest node plus the shortest-path
    /// length between those nodes.
    double generalized_distance(const WorldPoint& a, const WorldPoint& b) const {
        const int va = nearest_node(a);
        const int vb = nearest_node(b);
        return euclidean(a, nodes_[va]) + shortest_path_length(va, vb) + euclidean(nodes_[vb], b);
    }

    nlohmann::json to_json() const {
        nlohmann::json nodes = nlohmann::json::array();
        for (const WorldPoint& p : nodes_) nodes.push_back({p.x, p.y});
        nlohmann::json edges = nlohmann::json::array();
        for (std::size_t u = 0; u < adjacency_.size(); ++u)
            for (const auto& [v, w] : adjacency_[u])
                if (static_cast<int>(u) < v)
                    edges.push_back({u, v, w});
        return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
    }

    static RoadmapGraph from_json(const nlohmann::json& j) {
        RoadmapGraph g;
        for (const auto& n : j.at("nodes"))
            g.nodes_.push_back({n.at(0).get<double>(), n.at(1).get<double>()});
        if (g.nodes_.empty())
            throw GraphError("graph JSON: no nodes");
        g.adjacency_.resize(g.nodes_.size());
        for (const auto& e : j.at("edges")) {
            const int u = e.at(0).get<int>();
            const int v = e.at(1).get<int>();
            const double w = e.at(2).get<double>();
            if (u < 0 || v < 0 || u >= static_cast<int>(g.nodes_.size()) || v >= static_cast<int>(g.nodes_.size()) || u == v)
                throw GraphError("graph JSON: bad edge endpoints");
            if (std::abs(w - euclidean(g.nodes_[u], g.nodes_[v])) > 1e-9)
                throw GraphError("graph JSON: edge weight is not the Euclidean length");
            g.adjacency_[u].emplace_back(v, w);
            g.adjacency_[v].emplace_back(u, w);
        }
        for (auto& nbrs : g.adjacency_)
            std::sort(nbrs.begin(), nbrs.end());
        g.require_connected();
        g.build_spatial_index();
        return g;
    }

    static constexpr int kIndexThreshold = 4096;

private:
    RoadmapGraph() = default;

    void require_connected() const {
        std::vector<char> seen(nodes_.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [v, w] : adjacency_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
        }
        if (count != nodes_.size())
            throw GraphError("graph is not connected (" + std::to_string(count) + " of " +
                             std::to_string(nodes_.size()) + " nodes reachable)");
    }

    int nearest_linear(const WorldPoint& p, int from, int to) const {
        int best = from;
        double best_d = squared_distance(p, nodes_[from]);
        for (int i = from + 1; i < to; ++i) {
            const double d = squared_distance(p, nodes_[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    void build_spatial_index() {
        if (nodes_.size() < kIndexThreshold) return;
        min_x_ = max_x_ = nodes_[0].x;
        min_y_ = max_y_ = nodes_[0].y;
        for (const WorldPoint& p : nodes_) {
            min_x_ = std::min(min_x_, p.x);
            max_x_ = std::max(max_x_, p.x);
            min_y_ = std::min(min_y_, p.y);
            max_y_ = std::max(max_y_, p.y);
        }
        const int target = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(nodes_.size()))));
        nbx_ = std::max(1, target);
        nby_ = std::max(1, target);
        cell_w_ = std::max((max_x_ - min_x_) / nbx_, 1e-12);
        cell_h_ = std::max((max_y_ - min_y_) / nby_, 1e-12);
        buckets_.assign(static_cast<std::size_t>(nbx_) * nby_, {});
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            buckets_[bucket_of(nodes_[i])].push_back(static_cast<int>(i));
    }

    std::size_t bucket_of(const WorldPoint& p) const {
        const int bx = std::clamp(static_cast<int>((p.x - min_x_) / cell_w_), 0, nbx_ - 1);
        const int by = std::clamp(static_cast<int>((p.y - min_y_) / cell_h_), 0, nby_ - 1);
        return static_cast<std::size_t>(by) * nbx_ + bx;
    }

    int nearest_indexed(const WorldPoint& p) const {
        const int cbx = std::clamp(static_cast<int>((p.x - min_x_) / cell_w_), 0, nbx_ - 1);
        const int cby = std::clamp(static_cast<int>((p.y - min_y_) / cell_h_), 0, nby_ - 1);
        const double min_cell = std::min(cell_w_, cell_h_);
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        const int max_ring = std::max(nbx_, nby_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            // every point in a ring-R bucket is at least (R-1) cells away
            if (ring >= 2) {
                const double lower = (ring - 1) * min_cell;
                if (best >= 0 && lower * lower > best_d) break;
            }
            for (int by = cby - ring; by <= cby + ring; ++by) {
                if (by < 0 || by >= nby_) continue;
                for (int bx = cbx - ring; bx <= cbx + ring; ++bx) {
                    if (bx < 0 || bx >= nbx_) continue;
                    if (std::max(std::abs(bx - cbx), std::abs(by - cby)) != ring) continue;
                    for (int i : buckets_[static_cast<std::size_t>(by) * nbx_ + bx]) {
                        const double d = squared_distance(p, nodes_[i]);
                        if (d < best_d || (d == best_d && i < best)) {
                            best_d = d;
                            best = i;
                        }
                    }
                }
            }
        }
        return best;
    }

    struct SsspCache {
        std::mutex mutex;
        std::unordered_map<int, std::vector<double>> table;
    };

    std::vector<WorldPoint> nodes_;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    std::shared_ptr<SsspCache> cache_ = std::make_shared<SsspCache>();

    // bucket index, built only for large graphs
    std::vector<std::vector<int>> buckets_;
    double min_x_ = 0, max_x_ = 0, min_y_ = 0, max_y_ = 0;
    double cell_w_ = 1, cell_h_ = 1;
    int nbx_ = 0, nby_ = 0;
};

} // namespace gmcpos
