#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gmcpos/errors.hpp"
#include "gmcpos/occupancy_grid.hpp"

namespace gmcpos {

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view s, const std::string& what) {
    s = trim(s);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("invalid number for " + what + ": '" + std::string(s) + "'");
    return value;
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace detail

// ---------------------------------------------------------------------------
// ASCII fixture format
//
//   resolution: 0.5
//   origin: 10 20
//   #.#
//   ...
//
// '#' = Occupied, '.' = Free, '?' = Unknown. Row 0 of the file is the top
// of the map. UTF-8, LF line endings.
// ---------------------------------------------------------------------------

inline OccupancyGrid parse_ascii_map(const std::string& text) {
    std::istringstream in(text);
    std::string line;

    OccupancyGrid grid;
    bool have_resolution = false;
    bool have_origin = false;

    // Two header lines (either order), then the grid rows.
    for (int i = 0; i < 2; ++i) {
        if (!std::getline(in, line))
            throw ParseError("ASCII map: missing header lines");
        const std::string_view sv = detail::trim(line);
        if (sv.starts_with("resolution:")) {
            grid.resolution = detail::parse_double(sv.substr(11), "resolution");
            have_resolution = true;
        } else if (sv.starts_with("origin:")) {
            std::istringstream os{std::string(sv.substr(7))};
            if (!(os >> grid.origin.x >> grid.origin.y))
                throw ParseError("ASCII map: origin needs two numbers");
            have_origin = true;
        } else {
            throw ParseError("ASCII map: expected 'resolution:' or 'origin:' header, got '" + std::string(sv) + "'");
        }
    }
    if (!have_resolution || !have_origin)
        throw ParseError("ASCII map: duplicate header line");
    if (!(grid.resolution > 0.0))
        throw ParseError("ASCII map: resolution must be > 0");

    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        const std::string_view sv = detail::trim(line);
        if (sv.empty()) continue;
        rows.emplace_back(sv);
    }
    if (rows.empty())
        throw ParseError("ASCII map: no grid rows");

    grid.height_cells = static_cast<int>(rows.size());
    grid.width_cells = static_cast<int>(rows.front().size());
    grid.cells.reserve(static_cast<std::size_t>(grid.height_cells) * grid.width_cells);
    for (const std::string& row : rows) {
        if (static_cast<int>(row.size()) != grid.width_cells)
            throw ParseError("ASCII map: ragged row (expected width " + std::to_string(grid.width_cells) + ")");
        for (char ch : row) {
            switch (ch) {
            case '#': grid.cells.push_back(CellState::Occupied); break;
            case '.': grid.cells.push_back(CellState::Free); break;
            case '?': grid.cells.push_back(CellState::Unknown); break;
            default:
                throw ParseError(std::string("ASCII map: unknown cell symbol '") + ch + "'");
            }
        }
    }
    grid.validate();
    return grid;
}

inline std::string write_ascii_map(const OccupancyGrid& grid) {
    std::string out;
    out += "resolution: " + detail::format_double(grid.resolution) + "\n";
    out += "origin: " + detail::format_double(grid.origin.x) + " " + detail::format_double(grid.origin.y) + "\n";
    for (int r = 0; r < grid.height_cells; ++r) {
        for (int c = 0; c < grid.width_cells; ++c) {
            switch (grid.state(r, c)) {
            case CellState::Occupied: out += '#'; break;
            case CellState::Free: out += '.'; break;
            case CellState::Unknown: out += '?'; break;
            }
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metadata + PGM format (map-server style)
//
//   image: map.pgm
//   resolution: 0.05
//   origin: [0.0, 0.0, 0.0]
//   negate: 0
//   occupied_thresh: 0.65
//   free_thresh: 0.196
//
// The image is a binary 8-bit portable graymap (P5). A pixel value v maps
// to an occupancy probability p = (255 - v) / 255 (or v / 255 when
// negate=1); p > occupied_thresh -> Occupied, p < free_thresh -> Free,
// anything between -> Unknown.
// ---------------------------------------------------------------------------

struct MapMetadata {
    std::filesystem::path image;
    double resolution = 0.0;
    WorldPoint origin{};
    double theta = 0.0;
    int negate = 0;
    double occupied_thresh = 0.65;
    double free_thresh = 0.196;
};

inline MapMetadata parse_metadata(const std::string& text, const std::filesystem::path& base_dir) {
    MapMetadata meta;
    bool have_image = false, have_resolution = false, have_origin = false;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::string_view sv = detail::trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        const auto colon = sv.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("metadata: malformed line '" + std::string(sv) + "'");
        const std::string_view key = detail::trim(sv.substr(0, colon));
        const std::string_view value = detail::trim(sv.substr(colon + 1));

        if (key == "image") {
            meta.image = base_dir / std::string(value);
            have_image = true;
        } else if (key == "resolution") {
            meta.resolution = detail::parse_double(value, "resolution");
            have_resolution = true;
        } else if (key == "origin") {
            std::string_view v = value;
            if (v.size() < 2 || v.front() != '[' || v.back() != ']')
                throw ParseError("metadata: origin must be [x, y, theta]");
            v = v.substr(1, v.size() - 2);
            std::string inner(v);
            for (char& ch : inner)
                if (ch == ',') ch = ' ';
            std::istringstream os(inner);
            if (!(os >> meta.origin.x >> meta.origin.y >> meta.theta))
                throw ParseError("metadata: origin must be [x, y, theta]");
            have_origin = true;
        } else if (key == "negate") {
            meta.negate = static_cast<int>(detail::parse_double(value, "negate"));
        } else if (key == "occupied_thresh") {
            meta.occupied_thresh = detail::parse_double(value, "occupied_thresh");
        } else if (key == "free_thresh") {
            meta.free_thresh = detail::parse_double(value, "free_thresh");
        }
        // Unrecognized keys (mode, ...) are ignored.
    }

    if (!have_image) throw ParseError("metadata: missing 'image' key");
    if (!have_resolution) throw ParseError("metadata: missing 'resolution' key");
    if (!have_origin) throw ParseError("metadata: missing 'origin' key");
    if (!(meta.resolution > 0.0)) throw ParseError("metadata: resolution must be > 0");
    if (meta.theta != 0.0)
        throw ValidationError("metadata: map rotation (theta != 0) is not supported");
    if (meta.occupied_thresh < 0.0 || meta.occupied_thresh > 1.0 ||
        meta.free_thresh < 0.0 || meta.free_thresh > 1.0)
        throw ValidationError("metadata: thresholds must lie in [0, 1]");
    if (meta.free_thresh > meta.occupied_thresh)
        throw ValidationError("metadata: free_thresh must not exceed occupied_thresh");
    return meta;
}

struct PgmImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major, row 0 = top
};

inline PgmImage parse_pgm(const std::string& data, const std::string& name) {
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string {
        // Skip whitespace and '#' comments.
        while (pos < data.size()) {
            const char c = data[pos];
            if (c == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos;
            } else {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
        if (start == pos)
            throw ParseError("PGM " + name + ": truncated header");
        return data.substr(start, pos - start);
    };

    if (next_token() != "P5")
        throw ParseError("PGM " + name + ": not a binary portable graymap (P5)");
    PgmImage img;
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (img.width <= 0 || img.height <= 0)
        throw ParseError("PGM " + name + ": non-positive dimensions");
    if (maxval <= 0 || maxval > 255)
        throw ParseError("PGM " + name + ": only 8-bit graymaps are supported");
    ++pos; // single whitespace byte after maxval

    const std::size_t expected = static_cast<std::size_t>(img.width) * img.height;
    if (data.size() - pos != expected)
        throw ParseError("PGM " + name + ": pixel data size mismatch (expected " +
                         std::to_string(expected) + " bytes, got " + std::to_string(data.size() - pos) + ")");
    img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos), data.end());
    return img;
}

inline CellState classify_pixel(std::uint8_t v, const MapMetadata& meta) {
    const double p = meta.negate ? v / 255.0 : (255.0 - v) / 255.0;
    if (p > meta.occupied_thresh) return CellState::Occupied;
    if (p < meta.free_thresh) return CellState::Free;
    return CellState::Unknown;
}

inline OccupancyGrid grid_from_metadata(const MapMetadata& meta) {
    const PgmImage img = parse_pgm(detail::read_file(meta.image), meta.image.filename().string());
    OccupancyGrid grid;
    grid.width_cells = img.width;
    grid.height_cells = img.height;
    grid.resolution = meta.resolution;
    grid.origin = meta.origin;
    grid.cells.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        grid.cells[i] = classify_pixel(img.pixels[i], meta);
    grid.validate();
    return grid;
}

/// Parse either supported map format. A file containing an 'image:' key is
/// treated as a metadata file; anything else as an ASCII grid.
inline OccupancyGrid parse_map(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view sv = detail::trim(line);
        if (sv.starts_with("image:"))
            return grid_from_metadata(parse_metadata(text, path.parent_path()));
    }
    return parse_ascii_map(text);
}

} // namespace gmcpos
