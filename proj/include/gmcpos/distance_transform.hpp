#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "gmcpos/occupancy_grid.hpp"

namespace gmcpos {

/// Per-cell clearance in meters: Euclidean distance from each Free cell's
/// center to the nearest non-Free cell center. Non-Free cells carry 0.
/// The map border is ringed by virtual obstacles one cell outside the grid.
struct ClearanceField {
    int width = 0;
    int height = 0;
    double resolution = 0.0;
    std::vector<double> meters;        // row-major clearance
    std::vector<std::uint8_t> free;    // row-major Free mask

    double at(int row, int col) const { return meters[static_cast<std::size_t>(row) * width + col]; }
    double at(GridIndex c) const { return at(c.row, c.col); }
    bool is_free(int row, int col) const { return free[static_cast<std::size_t>(row) * width + col] != 0; }
    bool is_free(GridIndex c) const { return is_free(c.row, c.col); }
};

namespace detail {

// 1D squared-distance transform (lower envelope of parabolas).
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d, int n,
                   std::vector<int>& v, std::vector<double>& z) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace detail

/// Exact squared-cell-distance transform of an obstacle indicator sampled on
/// a (w x h) grid padded with a one-cell obstacle ring.
inline std::vector<double> squared_edt_padded(const std::vector<std::uint8_t>& obstacle,
                                              int width, int height) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int pw = width + 2;
    const int ph = height + 2;
    std::vector<double> g(static_cast<std::size_t>(pw) * ph, 0.0);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            g[static_cast<std::size_t>(r + 1) * pw + (c + 1)] =
                obstacle[static_cast<std::size_t>(r) * width + c] ? 0.0 : inf;

    const int n = std::max(pw, ph);
    std::vector<double> f(n), d(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);

    // Columns, then rows.
    for (int c = 0; c < pw; ++c) {
        for (int r = 0; r < ph; ++r) f[r] = g[static_cast<std::size_t>(r) * pw + c];
        detail::edt_1d(f, d, ph, v, z);
        for (int r = 0; r < ph; ++r) g[static_cast<std::size_t>(r) * pw + c] = d[r];
    }
    for (int r = 0; r < ph; ++r) {
        for (int c = 0; c < pw; ++c) f[c] = g[static_cast<std::size_t>(r) * pw + c];
        detail::edt_1d(f, d, pw, v, z);
        for (int c = 0; c < pw; ++c) g[static_cast<std::size_t>(r) * pw + c] = d[c];
    }

    // Crop the padding ring.
    std::vector<double> out(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            out[static_cast<std::size_t>(r) * width + c] = g[static_cast<std::size_t>(r + 1) * pw + (c + 1)];
    return out;
}

inline ClearanceField distance_transform(const OccupancyGrid& grid) {
    ClearanceField field;
    field.width = grid.width_cells;
    field.height = grid.height_cells;
    field.resolution = grid.resolution;
    field.free.resize(grid.cell_count());
    std::vector<std::uint8_t> obstacle(grid.cell_count());
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        field.free[i] = grid.cells[i] == CellState::Free ? 1 : 0;
        obstacle[i] = field.free[i] ? 0 : 1;
    }

    const std::vector<double> d2 = squared_edt_padded(obstacle, field.width, field.height);
    field.meters.resize(grid.cell_count());
    for (std::size_t i = 0; i < grid.cell_count(); ++i)
        field.meters[i] = field.free[i] ? std::sqrt(d2[i]) * grid.resolution : 0.0;
    return field;
}

} // namespace gmcpos
