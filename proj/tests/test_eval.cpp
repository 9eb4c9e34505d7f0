#include "core/eval.hpp"

#include "core/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ctiler;

namespace {

std::vector<Detection> world_dets(const std::vector<Point>& points) {
    std::vector<Detection> out;
    for (const auto& p : points) {
        Detection d;
        d.world = p;
        out.push_back(d);
    }
    return out;
}

} // namespace

TEST_CASE("match basics") {
    SUBCASE("identical point sets match perfectly") {
        std::vector<Point> pts = {{1, 1}, {50, 50}, {200, 10}};
        const auto m = match(pts, pts, 15.0);
        CHECK(m.tp == 3);
        CHECK(m.fp == 0);
        CHECK(m.fn == 0);
        for (const auto& p : m.pairs) CHECK(p.distance == 0.0);
    }
    SUBCASE("no detections means everything is missed") {
        std::vector<Point> truths(54, Point{0, 0});
        for (int i = 0; i < 54; ++i) truths[static_cast<size_t>(i)] = {i * 40.0, 0.0};
        const auto m = match(std::vector<Point>{}, truths, 15.0);
        CHECK(m.tp == 0);
        CHECK(m.fp == 0);
        CHECK(m.fn == 54);
    }
    SUBCASE("equidistant tie breaks to the lower truth index") {
        std::vector<Point> dets = {{10, 0}};
        std::vector<Point> truths = {{5, 0}, {15, 0}}; // both at distance 5
        const auto m = match(dets, truths, 15.0);
        CHECK(m.tp == 1);
        CHECK(m.fn == 1);
        REQUIRE(m.pairs.size() == 1);
        CHECK(m.pairs[0].truth == 0);
        CHECK(m.pairs[0].detection == 0);
    }
    SUBCASE("pairs beyond the radius are excluded") {
        const auto m = match(std::vector<Point>{{0, 0}}, std::vector<Point>{{20, 0}}, 15.0);
        CHECK(m.tp == 0);
        CHECK(m.fp == 1);
        CHECK(m.fn == 1);
    }
    SUBCASE("greedy takes the closest pair first") {
        std::vector<Point> dets = {{4, 0}, {1, 0}};
        std::vector<Point> truths = {{0, 0}, {2, 0}};
        const auto m = match(dets, truths, 15.0);
        CHECK(m.tp == 2);
        // det1 is at distance 1 from both truths; the tie goes to truth 0.
        // det0 then pairs with truth 1 at distance 2 (not truth 0 at 4).
        REQUIRE(m.pairs.size() == 2);
        CHECK(m.pairs[0].detection == 1);
        CHECK(m.pairs[0].truth == 0);
        CHECK(m.pairs[0].distance == doctest::Approx(1.0));
        CHECK(m.pairs[1].detection == 0);
        CHECK(m.pairs[1].truth == 1);
        CHECK(m.pairs[1].distance == doctest::Approx(2.0));
    }
    SUBCASE("tp never exceeds either set size") {
        SplitMix64 rng(15);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Point> dets, truths;
            const int nd = static_cast<int>(rng.next_below(10));
            const int nt = static_cast<int>(rng.next_below(10));
            for (int i = 0; i < nd; ++i) {
                dets.push_back({rng.next_double() * 100, rng.next_double() * 100});
            }
            for (int i = 0; i < nt; ++i) {
                truths.push_back({rng.next_double() * 100, rng.next_double() * 100});
            }
            const auto m = match(dets, truths, 30.0);
            CHECK(m.tp <= std::min(nd, nt));
            CHECK(m.tp + m.fp == nd);
            CHECK(m.tp + m.fn == nt);
        }
    }
    SUBCASE("radius must be positive") {
        CHECK_THROWS_AS(match(std::vector<Point>{}, std::vector<Point>{}, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("f1 arithmetic") {
    // 53 of 54 buildings found with no false positives: 106/107.
    CHECK(f1_score(53, 0, 1) == doctest::Approx(0.990654).epsilon(1e-4));
    CHECK(std::abs(f1_score(53, 0, 1) - 0.9907) < 0.0005);
    CHECK(f1_score(1, 1, 1) == doctest::Approx(0.5));
    CHECK(f1_score(0, 0, 0) == 1.0); // documented degenerate convention
    CHECK(f1_score(0, 3, 0) == 0.0);
    CHECK_THROWS_AS(f1_score(-1, 0, 0), std::invalid_argument);

    SUBCASE("symmetric in fp and fn, non-increasing in both") {
        SplitMix64 rng(8);
        for (int i = 0; i < 100; ++i) {
            const long long tp = static_cast<long long>(rng.next_below(50));
            const long long fp = static_cast<long long>(rng.next_below(50));
            const long long fn = static_cast<long long>(rng.next_below(50));
            CHECK(f1_score(tp, fp, fn) == f1_score(tp, fn, fp));
            if (tp + fp + fn > 0) {
                CHECK(f1_score(tp, fp + 1, fn) <= f1_score(tp, fp, fn));
                CHECK(f1_score(tp, fp, fn + 1) <= f1_score(tp, fp, fn));
            }
        }
    }
}

TEST_CASE("dice") {
    BinaryMask a(8, 8), b(8, 8);
    SUBCASE("identical non-empty masks") {
        a.set(1, 1, true);
        a.set(2, 2, true);
        CHECK(dice(a, a) == 1.0);
    }
    SUBCASE("disjoint non-empty masks") {
        a.set(0, 0, true);
        b.set(7, 7, true);
        CHECK(dice(a, b) == 0.0);
    }
    SUBCASE("half overlap") {
        a.set(0, 0, true);
        a.set(1, 0, true);
        b.set(1, 0, true);
        b.set(2, 0, true);
        CHECK(dice(a, b) == doctest::Approx(0.5));
    }
    SUBCASE("both empty is 1 by convention") {
        CHECK(dice(a, b) == 1.0);
    }
    SUBCASE("symmetry and range on random masks") {
        SplitMix64 rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            BinaryMask x(16, 16), y(16, 16);
            for (int i = 0; i < 40; ++i) {
                x.set(static_cast<int>(rng.next_below(16)), static_cast<int>(rng.next_below(16)),
                      rng.next_below(2) == 0);
                y.set(static_cast<int>(rng.next_below(16)), static_cast<int>(rng.next_below(16)),
                      rng.next_below(2) == 0);
            }
            const double d = dice(x, y);
            CHECK(d == dice(y, x));
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
            CHECK(dice(x, x) == 1.0);
        }
    }
    SUBCASE("dimension mismatch is an error") {
        BinaryMask c(4, 4);
        CHECK_THROWS_AS(dice(a, c), std::invalid_argument);
    }
}

TEST_CASE("change detection") {
    SUBCASE("identical epochs report no changes") {
        const auto epoch = world_dets({{100, 100}, {150, 150}, {900, 900}});
        const auto report = change_detect(epoch, epoch, 10.0, 300.0);
        CHECK(report.disappeared.empty());
        CHECK(report.appeared.empty());
    }
    SUBCASE("22 clustered points vanishing form one disappeared cluster") {
        // Points inside a 200 m disc; the other epoch is empty.
        SplitMix64 rng(1839);
        std::vector<Point> points;
        while (points.size() < 22) {
            const double dx = 200.0 * (2.0 * rng.next_double() - 1.0);
            const double dy = 200.0 * (2.0 * rng.next_double() - 1.0);
            if (dx * dx + dy * dy <= 200.0 * 200.0) {
                points.push_back({500703.0 + dx, 722113.0 + dy});
            }
        }
        const auto report = change_detect(world_dets(points), {}, 10.0, 300.0);
        REQUIRE(report.disappeared.size() == 1);
        CHECK(report.disappeared[0].size == 22);
        CHECK(report.appeared.empty());
        // cluster centroid is the mean of the member points
        double mx = 0, my = 0;
        for (const auto& p : points) {
            mx += p.first;
            my += p.second;
        }
        CHECK(report.disappeared[0].cx == doctest::Approx(mx / 22.0));
        CHECK(report.disappeared[0].cy == doctest::Approx(my / 22.0));
    }
    SUBCASE("a moved point is one disappearance plus one appearance") {
        const auto a = world_dets({{100, 100}, {500, 500}});
        const auto b = world_dets({{100, 100}, {600, 500}}); // moved 100 > radius
        const auto report = change_detect(a, b, 10.0, 50.0);
        REQUIRE(report.disappeared.size() == 1);
        REQUIRE(report.appeared.size() == 1);
        CHECK(report.disappeared[0].size == 1);
        CHECK(report.disappeared[0].cx == doctest::Approx(500.0));
        CHECK(report.appeared[0].cx == doctest::Approx(600.0));
    }
    SUBCASE("clusters sort by size descending") {
        std::vector<Point> pts;
        for (int i = 0; i < 3; ++i) pts.push_back({1000.0 + i * 10, 1000.0});
        pts.push_back({9000.0, 9000.0}); // far singleton
        const auto report = change_detect(world_dets(pts), {}, 10.0, 50.0);
        REQUIRE(report.disappeared.size() == 2);
        CHECK(report.disappeared[0].size == 3);
        CHECK(report.disappeared[1].size == 1);
    }
    SUBCASE("missing world coordinates are an error") {
        std::vector<Detection> bad(1);
        CHECK_THROWS_AS(change_detect(bad, {}, 10.0, 300.0), std::invalid_argument);
    }
}
