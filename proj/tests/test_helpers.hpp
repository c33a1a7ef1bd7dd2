#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gmcpos/map_io.hpp"
#include "gmcpos/occupancy_grid.hpp"

namespace testutil {

inline std::filesystem::path scratch_dir() {
    static const std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() / "gmcpos_tests";
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

inline std::filesystem::path write_file(const std::string& name, const std::string& content) {
    const auto path = scratch_dir() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string make_pgm(int width, int height, const std::vector<std::uint8_t>& pixels) {
    std::string data = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    data.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
    return data;
}

/// Grid straight from rows of '#', '.', '?' without going through a file.
inline gmcpos::OccupancyGrid grid_from_rows(const std::vector<std::string>& rows,
                                            double resolution = 1.0,
                                            gmcpos::WorldPoint origin = {0.0, 0.0}) {
    std::string text = "resolution: " + std::to_string(resolution) + "\n";
    text += "origin: " + std::to_string(origin.x) + " " + std::to_string(origin.y) + "\n";
    for (const std::string& r : rows) text += r + "\n";
    return gmcpos::parse_ascii_map(text);
}

/// Random mix of free/occupied/unknown cells with at least one free cell.
inline gmcpos::OccupancyGrid random_grid(std::mt19937& gen, int max_side = 30) {
    std::uniform_int_distribution<int> side(1, max_side);
    std::uniform_int_distribution<int> state(0, 9);
    const int w = side(gen);
    const int h = side(gen);
    gmcpos::OccupancyGrid grid;
    grid.width_cells = w;
    grid.height_cells = h;
    grid.resolution = std::uniform_real_distribution<double>(0.1, 2.0)(gen);
    grid.origin = {std::uniform_real_distribution<double>(-20.0, 20.0)(gen),
                   std::uniform_real_distribution<double>(-20.0, 20.0)(gen)};
    grid.cells.resize(static_cast<std::size_t>(w) * h);
    for (auto& c : grid.cells) {
        const int s = state(gen);
        c = s < 6 ? gmcpos::CellState::Free
                  : (s < 8 ? gmcpos::CellState::Occupied : gmcpos::CellState::Unknown);
    }
    grid.cells[std::uniform_int_distribution<std::size_t>(0, grid.cells.size() - 1)(gen)] =
        gmcpos::CellState::Free;
    return grid;
}

} // namespace testutil
