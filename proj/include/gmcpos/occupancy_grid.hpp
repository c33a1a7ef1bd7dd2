#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "gmcpos/errors.hpp"
#include "gmcpos/geometry.hpp"

namespace gmcpos {

enum class CellState : std::uint8_t { Free, Occupied, Unknown };

/// Which cells form the denominator of the coverage metric.
///   Known = Free + Occupied (mapped area, default)
///   Free  = traversable cells only
enum class Universe : std::uint8_t { Known, Free };

/// Canonical 2D occupancy grid. Cells are stored row-major with row 0 at
/// the TOP of the map image; the world origin is the bottom-left corner,
/// so world y grows toward smaller row indices.
struct OccupancyGrid {
    int width_cells = 0;
    int height_cells = 0;
    double resolution = 0.0; // meters per cell
    WorldPoint origin{};     // world position of the bottom-left map corner
    std::vector<CellState> cells;

    CellState state(int row, int col) const { return cells[static_cast<std::size_t>(row) * width_cells + col]; }
    CellState state(GridIndex c) const { return state(c.row, c.col); }

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_cells && col >= 0 && col < width_cells;
    }
    bool in_bounds(GridIndex c) const { return in_bounds(c.row, c.col); }

    double width_m() const { return width_cells * resolution; }
    double height_m() const { return height_cells * resolution; }

    /// World position of the center of cell (row, col).
    WorldPoint cell_center(int row, int col) const {
        return {origin.x + (col + 0.5) * resolution,
                origin.y + (height_cells - 1 - row + 0.5) * resolution};
    }
    WorldPoint cell_center(GridIndex c) const { return cell_center(c.row, c.col); }

    /// Cell containing a world point; points on a boundary fall into the
    /// higher-x / higher-y cell, clamped to the grid.
    GridIndex cell_at(const WorldPoint& p) const {
        int col = static_cast<int>(std::floor((p.x - origin.x) / resolution));
        int yi = static_cast<int>(std::floor((p.y - origin.y) / resolution));
        int row = height_cells - 1 - yi;
        col = std::max(0, std::min(col, width_cells - 1));
        row = std::max(0, std::min(row, height_cells - 1));
        return {row, col};
    }

    /// True when p lies inside the map rectangle [origin, origin + (W, H)].
    bool contains(const WorldPoint& p) const {
        return p.x >= origin.x && p.x <= origin.x + width_m() &&
               p.y >= origin.y && p.y <= origin.y + height_m();
    }

    std::size_t cell_count() const { return cells.size(); }

    /// Enforces the type invariants. Parsers call this before returning.
    void validate() const {
        if (width_cells <= 0 || height_cells <= 0)
            throw ValidationError("occupancy grid has non-positive dimensions");
        if (!(resolution > 0.0))
            throw ValidationError("occupancy grid resolution must be > 0");
        if (cells.size() != static_cast<std::size_t>(width_cells) * height_cells)
            throw ValidationError("occupancy grid cell array does not match dimensions");
        bool any_free = false;
        for (CellState s : cells)
            if (s == CellState::Free) { any_free = true; break; }
        if (!any_free)
            throw ValidationError("occupancy grid contains no free cells");
    }
};

/// Cell-center point sets used by the metric and the baseline:
/// known = Free + Occupied cells, free = Free cells. Unknown cells appear
/// in neither. Order is ascending (row, col).
inline std::pair<std::vector<WorldPoint>, std::vector<WorldPoint>>
cell_sets(const OccupancyGrid& grid) {
    std::vector<WorldPoint> known;
    std::vector<WorldPoint> free;
    for (int r = 0; r < grid.height_cells; ++r) {
        for (int c = 0; c < grid.width_cells; ++c) {
            switch (grid.state(r, c)) {
            case CellState::Free:
                known.push_back(grid.cell_center(r, c));
                free.push_back(grid.cell_center(r, c));
                break;
            case CellState::Occupied:
                known.push_back(grid.cell_center(r, c));
                break;
            case CellState::Unknown:
                break;
            }
        }
    }
    return {std::move(known), std::move(free)};
}

/// True when the cell belongs to the chosen coverage universe.
inline bool in_universe(CellState s, Universe u) {
    if (u == Universe::Free) return s == CellState::Free;
    return s != CellState::Unknown;
}

} // namespace gmcpos
