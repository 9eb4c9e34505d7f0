#include "core/pyramid.hpp"

#include "core/errors.hpp"
#include "core/geo.hpp"
#include "helpers/test_util.hpp"

#include <doctest.h>

#include <fstream>
#include <map>
#include <set>
#include <tuple>

using namespace ctiler;
using testutil::TempDir;

TEST_CASE("tile_grid counts for the reference configurations") {
    SUBCASE("1792x768 into 256x256 gives 21 tiles in a 7x3 grid") {
        const auto tiles = tile_grid(1792, 768, 256, 256);
        CHECK(tiles.size() == 21);
        CHECK(tiles.back().row == 2);
        CHECK(tiles.back().col == 6);
    }
    SUBCASE("7168x2304 into 1792x768 gives 12 tiles in a 4x3 grid") {
        const auto tiles = tile_grid(7168, 2304, 1792, 768);
        CHECK(tiles.size() == 12);
        CHECK(tiles.back().row == 2);
        CHECK(tiles.back().col == 3);
    }
    SUBCASE("exact single tile") {
        CHECK(tile_grid(256, 256, 256, 256).size() == 1);
    }
    SUBCASE("non-dividing extent pads the edge tiles") {
        const auto tiles = tile_grid(300, 300, 256, 256);
        REQUIRE(tiles.size() == 4); // ceil(300/256) = 2 per axis
        CHECK(tiles[3].rect == PixelRect{256, 256, 256, 256});
        CHECK(tiles[3].rect.x1() > 300); // padding beyond the map
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(tile_grid(0, 10, 4, 4), std::invalid_argument);
        CHECK_THROWS_AS(tile_grid(10, 10, 0, 4), std::invalid_argument);
    }
}

TEST_CASE("tile_grid tiles are disjoint and cover the raster") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 1 + static_cast<int>(rng.next_below(500));
        const int h = 1 + static_cast<int>(rng.next_below(400));
        const int tw = 1 + static_cast<int>(rng.next_below(64));
        const int th = 1 + static_cast<int>(rng.next_below(64));
        const auto tiles = tile_grid(w, h, tw, th);
        CHECK(tiles.size() ==
              static_cast<size_t>(grid_cols(w, tw)) * static_cast<size_t>(grid_rows(h, th)));
        // Disjointness and cover, checked by brute force on a small grid.
        std::map<std::pair<int, int>, int> cover;
        for (const auto& t : tiles) {
            for (int y = t.rect.y0; y < t.rect.y1(); ++y) {
                for (int x = t.rect.x0; x < t.rect.x1(); ++x) {
                    cover[{x, y}] += 1;
                }
            }
        }
        for (const auto& [px, count] : cover) CHECK(count == 1);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (!cover.count({x, y})) {
                    FAIL("pixel not covered");
                }
            }
        }
    }
}

TEST_CASE("subdivide covers the parent and carries level+1") {
    SUBCASE("1792x768 parent into 256x256 children") {
        const TileRef parent{1, 0, 0, {0, 0, 1792, 768}};
        const auto children = subdivide(parent, {256, 256});
        CHECK(children.size() == 21);
        for (const auto& c : children) CHECK(c.level == 2);
    }
    SUBCASE("exact quartering") {
        const TileRef parent{2, 1, 1, {256, 256, 256, 256}};
        const auto children = subdivide(parent, {128, 128});
        REQUIRE(children.size() == 4);
        CHECK(children[0].rect == PixelRect{256, 256, 128, 128});
        CHECK(children[3].rect == PixelRect{384, 384, 128, 128});
        CHECK(children[0].row == 2);
        CHECK(children[0].col == 2);
    }
    SUBCASE("non-dividing child size pads within the parent") {
        const TileRef parent{1, 0, 0, {0, 0, 256, 256}};
        const auto children = subdivide(parent, {100, 100});
        CHECK(children.size() == 9);
    }
    SUBCASE("children larger than the parent are rejected") {
        const TileRef parent{1, 0, 0, {0, 0, 128, 128}};
        CHECK_THROWS_AS(subdivide(parent, {256, 256}), std::invalid_argument);
    }
}

TEST_CASE("subdividing every level-i tile reproduces the deeper grid") {
    // Holds whenever child dims divide parent dims.
    const int w = 7168, h = 2304;
    const auto parents = tile_grid(w, h, 1792, 768);
    std::set<std::tuple<int, int, int, int, int, int>> from_subdivide;
    for (const auto& p : parents) {
        for (const auto& c : subdivide(p, {256, 256})) {
            from_subdivide.insert({c.row, c.col, c.rect.x0, c.rect.y0, c.rect.w, c.rect.h});
        }
    }
    std::set<std::tuple<int, int, int, int, int, int>> from_grid;
    for (const auto& c : tile_grid(w, h, 256, 256)) {
        from_grid.insert({c.row, c.col, c.rect.x0, c.rect.y0, c.rect.w, c.rect.h});
    }
    CHECK(from_subdivide == from_grid);
}

TEST_CASE("extract crops and pads") {
    // 300x300 gradient-ish map
    Raster map(300, 300);
    for (int y = 0; y < 300; ++y) {
        for (int x = 0; x < 300; ++x) {
            map.set(x, y, static_cast<uint8_t>((x * 7 + y * 13) % 251));
        }
    }
    SUBCASE("interior tile is an exact crop") {
        const TileRef tile{1, 0, 0, {10, 20, 50, 40}};
        const Raster crop = extract(map, tile, 255);
        REQUIRE(crop.width == 50);
        REQUIRE(crop.height == 40);
        for (int y = 0; y < 40; ++y) {
            for (int x = 0; x < 50; ++x) {
                CHECK(crop.at(x, y) == map.at(10 + x, 20 + y));
            }
        }
    }
    SUBCASE("bottom-right edge tile gets white padding") {
        const auto tiles = tile_grid(300, 300, 256, 256);
        const Raster crop = extract(map, tiles[3], 255);
        CHECK(crop.at(0, 0) == map.at(256, 256));
        CHECK(crop.at(43, 43) == map.at(299, 299));
        CHECK(crop.at(44, 0) == 255);
        CHECK(crop.at(0, 44) == 255);
        CHECK(crop.at(255, 255) == 255);
    }
    SUBCASE("fully outside tile is an error") {
        const TileRef outside{1, 9, 9, {512, 512, 64, 64}};
        CHECK_THROWS_AS(extract(map, outside, 255), std::invalid_argument);
    }
}

TEST_CASE("pixel/world affine") {
    SUBCASE("unit affine") {
        const AffineGeo geo{0.0, 0.0, 1.0, -1.0};
        auto [wx, wy] = pixel_to_world(geo, 10, 20);
        CHECK(wx == doctest::Approx(10.0));
        CHECK(wy == doctest::Approx(-20.0));
    }
    SUBCASE("half-metre pixels reach the reference coordinates") {
        const AffineGeo geo{500000.0, 723000.0, 0.5, -0.5};
        auto [wx, wy] = pixel_to_world(geo, 1406, 1774);
        CHECK(wx == doctest::Approx(500703.0).epsilon(1e-12));
        CHECK(wy == doctest::Approx(722113.0).epsilon(1e-12));
    }
    SUBCASE("origin pixel") {
        const AffineGeo geo{123.0, 456.0, 2.0, -3.0};
        auto [wx, wy] = pixel_to_world(geo, 0, 0);
        CHECK(wx == 123.0);
        CHECK(wy == 456.0);
    }
    SUBCASE("round trip within 1e-9") {
        const AffineGeo geo{500000.25, 722999.75, 0.5, -0.5};
        SplitMix64 rng(3);
        for (int i = 0; i < 200; ++i) {
            const double x = 10000.0 * rng.next_double();
            const double y = 10000.0 * rng.next_double();
            auto [wx, wy] = pixel_to_world(geo, x, y);
            auto [bx, by] = world_to_pixel(geo, wx, wy);
            CHECK(bx == doctest::Approx(x).epsilon(1e-9));
            CHECK(by == doctest::Approx(y).epsilon(1e-9));
        }
    }
}

TEST_CASE("world file round trip and validation") {
    TempDir dir("wld");
    const AffineGeo geo{500000.0, 723000.0, 0.5, -0.5};
    write_world_file(dir / "map.wld", geo);
    const AffineGeo back = read_world_file(dir / "map.wld");
    CHECK(back.origin_x == geo.origin_x);
    CHECK(back.origin_y == geo.origin_y);
    CHECK(back.px_size_x == geo.px_size_x);
    CHECK(back.px_size_y == geo.px_size_y);

    SUBCASE("truncated file") {
        std::ofstream out(dir / "short.wld");
        out << "0.5\n-0.5\n";
        out.close();
        CHECK_THROWS_AS(read_world_file(dir / "short.wld"), IoError);
    }
    SUBCASE("non-numeric line") {
        std::ofstream out(dir / "bad.wld");
        out << "0.5\nnope\n1\n2\n";
        out.close();
        CHECK_THROWS_AS(read_world_file(dir / "bad.wld"), IoError);
    }
}

TEST_CASE("schedule validation") {
    CHECK_NOTHROW(validate_schedule({{1792, 768}, {256, 256}}));
    CHECK_NOTHROW(validate_schedule({{256, 256}, {256, 256}}));
    CHECK_THROWS_AS(validate_schedule({}), std::invalid_argument);
    CHECK_THROWS_AS(validate_schedule({{256, 256}, {512, 256}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_schedule({{0, 256}}), std::invalid_argument);
}
