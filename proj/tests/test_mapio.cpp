#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gmcpos/map_io.hpp"
#include "test_helpers.hpp"

using namespace gmcpos;

TEST_CASE("ASCII map: all-free 3x3") {
    const auto grid = testutil::grid_from_rows({"...", "...", "..."}, 1.0, {0.0, 0.0});
    REQUIRE(grid.width_cells == 3);
    REQUIRE(grid.height_cells == 3);
    int free = 0;
    for (auto s : grid.cells)
        if (s == CellState::Free) ++free;
    CHECK(free == 9);
    const WorldPoint center = grid.cell_center(1, 1);
    CHECK(center.x == Catch::Approx(1.5));
    CHECK(center.y == Catch::Approx(1.5));
}

TEST_CASE("ASCII map: cell centers honor resolution and origin") {
    const auto path = testutil::write_file("row.txt", "resolution: 0.5\norigin: 10 20\n#.#\n");
    const auto grid = parse_map(path);
    REQUIRE(grid.width_cells == 3);
    REQUIRE(grid.height_cells == 1);
    CHECK(grid.state(0, 1) == CellState::Free);
    const WorldPoint mid = grid.cell_center(0, 1);
    CHECK(mid.x == Catch::Approx(10.75));
    CHECK(mid.y == Catch::Approx(20.25));
}

TEST_CASE("ASCII map: row 0 is the top of the map") {
    // top row occupied, bottom row free; world y of the bottom row is lower
    const auto grid = testutil::grid_from_rows({"##", ".."}, 1.0, {0.0, 0.0});
    CHECK(grid.state(0, 0) == CellState::Occupied);
    CHECK(grid.state(1, 0) == CellState::Free);
    CHECK(grid.cell_center(1, 0).y == Catch::Approx(0.5));
    CHECK(grid.cell_center(0, 0).y == Catch::Approx(1.5));
}

TEST_CASE("ASCII map: parse errors") {
    CHECK_THROWS_AS(parse_ascii_map("resolution: 1\norigin: 0 0\n.x.\n"), ParseError);
    CHECK_THROWS_AS(parse_ascii_map("resolution: 1\norigin: 0 0\n..\n...\n"), ParseError);
    CHECK_THROWS_AS(parse_ascii_map("resolution: 1\norigin: 0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_ascii_map("resolution: 0\norigin: 0 0\n..\n"), ParseError);
    // all-occupied map is rejected at validation
    CHECK_THROWS_AS(parse_ascii_map("resolution: 1\norigin: 0 0\n##\n##\n"), ValidationError);
}

TEST_CASE("metadata + PGM: threshold classification") {
    // p = (255 - v)/255 against occupied_thresh / free_thresh
    const auto pgm = testutil::write_file("tri.pgm", testutil::make_pgm(3, 1, {0, 254, 205}));
    const std::string meta = "image: tri.pgm\nresolution: 0.05\norigin: [0.0, 0.0, 0.0]\n"
                             "negate: 0\noccupied_thresh: 0.65\nfree_thresh: 0.196\n";
    const auto path = testutil::write_file("tri.meta", meta);
    const auto grid = parse_map(path);
    CHECK(grid.state(0, 0) == CellState::Occupied); // p = 1.0
    CHECK(grid.state(0, 1) == CellState::Free);     // p ~ 0.0039
    CHECK(grid.state(0, 2) == CellState::Unknown);  // p ~ 0.196078
}

TEST_CASE("metadata + PGM: negate flips the probability") {
    const auto pgm = testutil::write_file("neg.pgm", testutil::make_pgm(2, 1, {255, 0}));
    const std::string meta = "image: neg.pgm\nresolution: 0.05\norigin: [0.0, 0.0, 0.0]\nnegate: 1\n";
    const auto path = testutil::write_file("neg.meta", meta);
    const auto grid = parse_map(path);
    CHECK(grid.state(0, 0) == CellState::Occupied);
    CHECK(grid.state(0, 1) == CellState::Free);
}

TEST_CASE("metadata + PGM: error paths") {
    SECTION("missing image file") {
        const auto path = testutil::write_file("miss.meta",
                                               "image: nowhere.pgm\nresolution: 0.05\norigin: [0, 0, 0]\n");
        CHECK_THROWS_AS(parse_map(path), ParseError);
    }
    SECTION("pixel data size mismatch") {
        auto data = testutil::make_pgm(4, 4, std::vector<std::uint8_t>(16, 254));
        data.pop_back();
        testutil::write_file("short.pgm", data);
        const auto path = testutil::write_file("short.meta",
                                               "image: short.pgm\nresolution: 0.05\norigin: [0, 0, 0]\n");
        CHECK_THROWS_AS(parse_map(path), ParseError);
    }
    SECTION("rotated maps are rejected") {
        testutil::write_file("rot.pgm", testutil::make_pgm(1, 1, {254}));
        const auto path = testutil::write_file("rot.meta",
                                               "image: rot.pgm\nresolution: 0.05\norigin: [0, 0, 1.57]\n");
        CHECK_THROWS_AS(parse_map(path), ValidationError);
    }
    SECTION("thresholds out of range") {
        testutil::write_file("thr.pgm", testutil::make_pgm(1, 1, {254}));
        const auto path = testutil::write_file("thr.meta",
                                               "image: thr.pgm\nresolution: 0.05\norigin: [0, 0, 0]\n"
                                               "occupied_thresh: 1.5\n");
        CHECK_THROWS_AS(parse_map(path), ValidationError);
    }
}

TEST_CASE("metadata + PGM: image row 0 lands at the top of the world") {
    // 1x2 image: top pixel occupied, bottom free
    testutil::write_file("flip.pgm", testutil::make_pgm(1, 2, {0, 254}));
    const auto path = testutil::write_file("flip.meta",
                                           "image: flip.pgm\nresolution: 1.0\norigin: [5.0, 7.0, 0]\n");
    const auto grid = parse_map(path);
    CHECK(grid.state(0, 0) == CellState::Occupied);
    CHECK(grid.state(1, 0) == CellState::Free);
    CHECK(grid.cell_center(1, 0).y == Catch::Approx(7.5)); // bottom row near origin
    CHECK(grid.cell_center(0, 0).y == Catch::Approx(8.5));
}

TEST_CASE("cell_sets: universe counting") {
    SECTION("all free 2x2") {
        const auto grid = testutil::grid_from_rows({"..", ".."});
        const auto [known, free] = cell_sets(grid);
        CHECK(known.size() == 4);
        CHECK(free.size() == 4);
    }
    SECTION("one occupied") {
        const auto grid = testutil::grid_from_rows({"#.", ".."});
        const auto [known, free] = cell_sets(grid);
        CHECK(known.size() == 4);
        CHECK(free.size() == 3);
    }
    SECTION("one unknown") {
        const auto grid = testutil::grid_from_rows({"?.", ".."});
        const auto [known, free] = cell_sets(grid);
        CHECK(known.size() == 3);
        CHECK(free.size() == 3);
    }
}

TEST_CASE("cell_sets properties on random grids") {
    std::mt19937 gen(991);
    for (int trial = 0; trial < 50; ++trial) {
        const auto grid = testutil::random_grid(gen);
        const auto [known, free] = cell_sets(grid);

        // free is a subset of known
        std::size_t fi = 0;
        for (const WorldPoint& k : known)
            if (fi < free.size() && k == free[fi]) ++fi;
        CHECK(fi == free.size());

        // every point lies inside the world rectangle
        for (const WorldPoint& p : known) {
            CHECK(p.x >= grid.origin.x);
            CHECK(p.x <= grid.origin.x + grid.width_m());
            CHECK(p.y >= grid.origin.y);
            CHECK(p.y <= grid.origin.y + grid.height_m());
        }
    }
}

TEST_CASE("ASCII round-trip is the identity") {
    std::mt19937 gen(1207);
    for (int trial = 0; trial < 50; ++trial) {
        const auto grid = testutil::random_grid(gen);
        const auto back = parse_ascii_map(write_ascii_map(grid));
        CHECK(back.width_cells == grid.width_cells);
        CHECK(back.height_cells == grid.height_cells);
        CHECK(back.resolution == grid.resolution);
        CHECK(back.origin == grid.origin);
        CHECK(back.cells == grid.cells);
    }
}
