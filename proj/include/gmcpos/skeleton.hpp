#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "gmcpos/distance_transform.hpp"
#include "gmcpos/errors.hpp"

namespace gmcpos {

struct SkeletonParams {
    double segment_length = 1.0;        // max spacing between consecutive graph nodes (m)
    double crossing_merge_radius = 0.4; // junctions closer than this merge (m)
    double end_segment_min_length = 1.0;// dangling branches shorter than this are pruned (m)
    double min_clearance = 0.25;        // minimum obstacle clearance of skeleton cells (m)
};

namespace detail {

// Ring of the 8 neighbors, clockwise from NW.
inline constexpr int ring_dr[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
inline constexpr int ring_dc[8] = {-1, 0, 1, 1, 1, 0, -1, -1};

// (8,4) simple-point test: removing the cell must neither split nor merge
// foreground components nor create/destroy holes. Foreground uses
// 8-connectivity, background 4-connectivity.
inline bool is_simple_8_4(const std::uint8_t ring[8]) {
    // 8-components of foreground ring cells.
    int fg_components = 0;
    int comp[8];
    for (int i = 0; i < 8; ++i) comp[i] = -1;
    for (int i = 0; i < 8; ++i) {
        if (!ring[i] || comp[i] >= 0) continue;
        comp[i] = fg_components;
        // flood within the ring using true 8-adjacency of the offsets
        bool grew = true;
        while (grew) {
            grew = false;
            for (int a = 0; a < 8; ++a) {
                if (!ring[a] || comp[a] != fg_components) continue;
                for (int b = 0; b < 8; ++b) {
                    if (!ring[b] || comp[b] >= 0) continue;
                    if (std::abs(ring_dr[a] - ring_dr[b]) <= 1 && std::abs(ring_dc[a] - ring_dc[b]) <= 1) {
                        comp[b] = fg_components;
                        grew = true;
                    }
                }
            }
        }
        ++fg_components;
    }
    if (fg_components != 1) return false;

    // 4-components of background ring cells that touch the center 4-adjacently.
    int bg_components = 0;
    int bcomp[8];
    for (int i = 0; i < 8; ++i) bcomp[i] = -1;
    for (int i = 0; i < 8; ++i) {
        if (ring[i] || bcomp[i] >= 0) continue;
        bcomp[i] = bg_components;
        bool grew = true;
        while (grew) {
            grew = false;
            for (int a = 0; a < 8; ++a) {
                if (ring[a] || bcomp[a] != bg_components) continue;
                for (int b = 0; b < 8; ++b) {
                    if (ring[b] || bcomp[b] >= 0) continue;
                    if (std::abs(ring_dr[a] - ring_dr[b]) + std::abs(ring_dc[a] - ring_dc[b]) == 1) {
                        bcomp[b] = bg_components;
                        grew = true;
                    }
                }
            }
        }
        ++bg_components;
    }
    int bg_touching = 0;
    bool seen[8] = {};
    for (int i = 1; i < 8; i += 2) { // odd ring indices are the 4-neighbors
        if (ring[i] || bcomp[i] < 0) continue;
        if (!seen[bcomp[i]]) {
            seen[bcomp[i]] = true;
            ++bg_touching;
        }
    }
    return bg_touching == 1;
}

} // namespace detail

/// Ridge test on the clearance field: the cell dominates at least one
/// opposite-neighbor pair, strictly on the (row, col)-earlier side. The
/// asymmetry keeps two-cell-wide plateaus from being marked twice.
inline bool is_ridge_cell(const ClearanceField& field, int row, int col) {
    const double c = field.at(row, col);
    if (c <= 0.0) return false;
    auto clearance = [&](int r, int k) -> double {
        if (r < 0 || r >= field.height || k < 0 || k >= field.width) return 0.0;
        return field.at(r, k);
    };
    // pairs: (W,E), (N,S), (NW,SE), (NE,SW); first member is (row,col)-earlier
    const int pr[4][2][2] = {{{0, -1}, {0, 1}}, {{-1, 0}, {1, 0}}, {{-1, -1}, {1, 1}}, {{-1, 1}, {1, -1}}};
    for (const auto& pair : pr) {
        const double lo = clearance(row + pair[0][0], col + pair[0][1]);
        const double hi = clearance(row + pair[1][0], col + pair[1][1]);
        if (lo < c && hi <= c) return true;
    }
    return false;
}

/// Thin connected skeleton of the free space: ridge cells of the clearance
/// field anchor an ordered, topology-preserving thinning of all eligible
/// cells. Eligibility requires clearance >= max(min_clearance, 1.5 * res);
/// the 1.5-cell floor guarantees every skeleton cell has a fully Free
/// 8-neighborhood, which keeps later edge chords off obstacle corners.
/// Returns the skeleton cells in ascending (row, col) order.
inline std::vector<GridIndex> extract_skeleton(const ClearanceField& field, const SkeletonParams& params) {
    const int w = field.width;
    const int h = field.height;
    const double floor_m = 1.5 * field.resolution;
    const double threshold = std::max(params.min_clearance, floor_m);

    std::vector<std::uint8_t> in_set(static_cast<std::size_t>(w) * h, 0);
    std::vector<GridIndex> eligible;
    bool any_free = false;
    bool any_above_floor = false;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!field.is_free(r, c)) continue;
            any_free = true;
            const double m = field.at(r, c);
            if (m >= floor_m) any_above_floor = true;
            if (m >= threshold) {
                in_set[static_cast<std::size_t>(r) * w + c] = 1;
                eligible.push_back({r, c});
            }
        }
    }
    if (eligible.empty()) {
        if (!any_free)
            throw NoSkeletonError("no skeleton: map has no free cells");
        if (any_above_floor)
            throw NoSkeletonError("no skeleton: min_clearance=" + std::to_string(params.min_clearance) +
                                  " leaves no eligible cells");
        throw NoSkeletonError("no skeleton: free space is narrower than 1.5 cells everywhere "
                              "(min_clearance=" + std::to_string(params.min_clearance) + ")");
    }

    std::vector<std::uint8_t> anchor(static_cast<std::size_t>(w) * h, 0);
    for (const GridIndex& cell : eligible)
        if (is_ridge_cell(field, cell.row, cell.col))
            anchor[static_cast<std::size_t>(cell.row) * w + cell.col] = 1;

    // Peel boundary-inward: eligible cells in ascending (clearance, row, col).
    std::vector<GridIndex> order = eligible;
    std::stable_sort(order.begin(), order.end(), [&](const GridIndex& a, const GridIndex& b) {
        return field.at(a) < field.at(b);
    });

    auto in = [&](int r, int c) -> std::uint8_t {
        if (r < 0 || r >= h || c < 0 || c >= w) return 0;
        return in_set[static_cast<std::size_t>(r) * w + c];
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (const GridIndex& cell : order) {
            const std::size_t idx = static_cast<std::size_t>(cell.row) * w + cell.col;
            if (!in_set[idx] || anchor[idx]) continue;
            std::uint8_t ring[8];
            for (int k = 0; k < 8; ++k)
                ring[k] = in(cell.row + detail::ring_dr[k], cell.col + detail::ring_dc[k]);
            if (detail::is_simple_8_4(ring)) {
                in_set[idx] = 0;
                changed = true;
            }
        }
    }

    std::vector<GridIndex> skeleton;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (in_set[static_cast<std::size_t>(r) * w + c])
                skeleton.push_back({r, c});
    return skeleton;
}

} // namespace gmcpos
