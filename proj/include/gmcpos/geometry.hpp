#pragma once

#include <cmath>
#include <compare>

namespace gmcpos {

/// A position in world coordinates (meters).
struct WorldPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

inline double euclidean(const WorldPoint& a, const WorldPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline double squared_distance(const WorldPoint& a, const WorldPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

/// A cell address in a raster grid. Row 0 is the top row of the map image.
struct GridIndex {
    int row = 0;
    int col = 0;

    friend bool operator==(const GridIndex&, const GridIndex&) = default;
    friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

} // namespace gmcpos
