#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "gmcpos/errors.hpp"
#include "gmcpos/geometry.hpp"
#include "gmcpos/occupancy_grid.hpp"

namespace gmcpos {

struct CoverageReport {
    long total_cells = 0;          // |universe|
    long covered_cells = 0;        // cells within r of any position
    double acp = 0.0;              // 100 * covered / total
    Universe universe = Universe::Known;
    std::vector<std::uint8_t> mask; // full-grid row-major covered flags

    nlohmann::json to_json() const {
        return {{"A", total_cells},
                {"A_cover", covered_cells},
                {"acp", acp},
                {"universe", universe == Universe::Free ? "free" : "known"}};
    }
};

namespace detail {

/// OR the radius-r disk around `center` into `mask`, restricted to the
/// universe. Distances compare squared against r^2, cell centers only.
inline void rasterize_disk(const OccupancyGrid& grid, const WorldPoint& center, double r,
                           Universe universe, std::vector<std::uint8_t>& mask) {
    const double r2 = r * r;
    // conservative cell window around the disk
    const GridIndex lo = grid.cell_at({center.x - r, center.y + r});
    const GridIndex hi = grid.cell_at({center.x + r, center.y - r});
    for (int row = std::max(0, lo.row - 1); row <= std::min(grid.height_cells - 1, hi.row + 1); ++row) {
        for (int col = std::max(0, lo.col - 1); col <= std::min(grid.width_cells - 1, hi.col + 1); ++col) {
            if (!in_universe(grid.state(row, col), universe)) continue;
            if (squared_distance(grid.cell_center(row, col), center) <= r2)
                mask[static_cast<std::size_t>(row) * grid.width_cells + col] = 1;
        }
    }
}

} // namespace detail

/// Universe cells within Euclidean distance r of `center` (no occlusion),
/// in ascending (row, col) order.
inline std::vector<GridIndex> covered_cells(const OccupancyGrid& grid, const WorldPoint& center,
                                            double r, Universe universe = Universe::Known) {
    if (!(r > 0.0))
        throw ValidationError("coverage radius must be > 0");
    std::vector<std::uint8_t> mask(grid.cell_count(), 0);
    detail::rasterize_disk(grid, center, r, universe, mask);
    std::vector<GridIndex> out;
    for (int row = 0; row < grid.height_cells; ++row)
        for (int col = 0; col < grid.width_cells; ++col)
            if (mask[static_cast<std::size_t>(row) * grid.width_cells + col])
                out.push_back({row, col});
    return out;
}

/// Area Coverage Percentage of the union of radius-r disks around all
/// positions and the operator. Overlaps count once.
inline CoverageReport acp_report(const OccupancyGrid& grid, const std::vector<WorldPoint>& positions,
                                 const WorldPoint& operator_pos, double r,
                                 Universe universe = Universe::Known) {
    if (!(r > 0.0))
        throw ValidationError("coverage radius must be > 0");
    CoverageReport report;
    report.universe = universe;
    report.mask.assign(grid.cell_count(), 0);

    for (const CellState s : grid.cells)
        if (in_universe(s, universe)) ++report.total_cells;
    if (report.total_cells == 0)
        throw ValidationError("coverage universe is empty");

    detail::rasterize_disk(grid, operator_pos, r, universe, report.mask);
    for (const WorldPoint& p : positions)
        detail::rasterize_disk(grid, p, r, universe, report.mask);

    for (const std::uint8_t m : report.mask)
        if (m) ++report.covered_cells;
    report.acp = 100.0 * static_cast<double>(report.covered_cells) / static_cast<double>(report.total_cells);
    return report;
}

} // namespace gmcpos
