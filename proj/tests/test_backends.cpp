#include "core/backends.hpp"

#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/pipeline.hpp"
#include "core/synthmap.hpp"
#include "helpers/test_util.hpp"

#include <doctest.h>

#include <fstream>

using namespace ctiler;
using testutil::TempDir;

namespace {

/// Literal transcription of the cross-hatch predicate, kept separate from the
/// production loops on purpose.
bool slow_predicate(const Raster& t, int x, int y) {
    auto dark = [&](int px, int py) {
        if (px < 0 || py < 0 || px >= t.width || py >= t.height) return false;
        return t.at(px, py) < 128;
    };
    if (!dark(x, y)) return false;
    const bool horiz = dark(x - 1, y) || dark(x - 2, y) || dark(x + 1, y) || dark(x + 2, y);
    const bool vert = dark(x, y - 1) || dark(x, y - 2) || dark(x, y + 1) || dark(x, y + 2);
    return horiz && vert;
}

double slow_response(const Raster& t) {
    if (t.width <= 4 || t.height <= 4) return 0.0;
    long long hits = 0;
    for (int y = 2; y < t.height - 2; ++y) {
        for (int x = 2; x < t.width - 2; ++x) {
            if (slow_predicate(t, x, y)) ++hits;
        }
    }
    return static_cast<double>(hits) /
           (static_cast<double>(t.width - 4) * static_cast<double>(t.height - 4));
}

TileRef dummy_ref(int w, int h) {
    return TileRef{1, 0, 0, {0, 0, w, h}};
}

} // namespace

TEST_CASE("hatch response basics") {
    SUBCASE("all white is 0") {
        CHECK(hatch_response(Raster(64, 64, 255)) == 0.0);
    }
    SUBCASE("all black is 1") {
        CHECK(hatch_response(Raster(64, 64, 0)) == 1.0);
    }
    SUBCASE("single dark horizontal line has no vertical support") {
        Raster img(64, 64, 255);
        for (int x = 0; x < 64; ++x) img.set(x, 30, 0);
        CHECK(hatch_response(img) == 0.0);
    }
    SUBCASE("single dark vertical line has no horizontal support") {
        Raster img(64, 64, 255);
        for (int y = 0; y < 64; ++y) img.set(30, y, 0);
        CHECK(hatch_response(img) == 0.0);
    }
    SUBCASE("degenerate tiles have no interior") {
        CHECK(hatch_response(Raster(4, 64, 0)) == 0.0);
        CHECK(hatch_response(Raster(64, 3, 0)) == 0.0);
    }
    SUBCASE("agrees with the slow transcription on noise images") {
        for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            Raster img = testutil::random_raster(48, 32, seed);
            CHECK(hatch_response(img) == doctest::Approx(slow_response(img)).epsilon(1e-15));
        }
    }
}

TEST_CASE("heuristic classifier verdicts") {
    HeuristicClassifier cls; // tau 0.5, rho 0.002

    SUBCASE("blank tile is confidently negative") {
        const Raster blank(256, 256, 255);
        const Verdict v = cls.classify(blank, dummy_ref(256, 256));
        CHECK(v.label == Label::no_buildings);
        CHECK(v.confidence <= 0.1);
    }
    SUBCASE("a full hatched building reads confidently positive") {
        SynthParams p;
        p.seed = 42;
        auto [map, truth] = generate(p);
        REQUIRE_FALSE(truth.buildings.empty());
        // pick a tile fully containing a building
        bool found = false;
        for (const auto& t : tile_grid(p.width, p.height, 256, 256)) {
            for (const auto& b : truth.buildings) {
                if (b.rect.x0 >= t.rect.x0 && b.rect.x1() <= t.rect.x1() &&
                    b.rect.y0 >= t.rect.y0 && b.rect.y1() <= t.rect.y1()) {
                    const Raster tile = extract(map, t, 255);
                    const Verdict v = cls.classify(tile, t);
                    CHECK(v.label == Label::buildings);
                    CHECK(v.confidence >= 0.9);
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        CHECK(found);
    }
    SUBCASE("declared dimensions are enforced") {
        HeuristicClassifier sized(0.5, 0.002, Extent{256, 256});
        const Raster small(64, 64, 255);
        CHECK_THROWS_AS(sized.classify(small, dummy_ref(64, 64)), BackendError);
    }
    SUBCASE("threshold monotonicity: raising tau never adds positives") {
        SynthParams p;
        p.seed = 13;
        auto [map, truth] = generate(p);
        const auto tiles = tile_grid(p.width, p.height, 256, 256);
        std::vector<double> taus = {0.1, 0.3, 0.5, 0.7, 0.9};
        std::vector<int> counts;
        for (double tau : taus) {
            HeuristicClassifier c(tau);
            int positives = 0;
            for (size_t i = 0; i < tiles.size(); i += 7) { // sample for speed
                const Raster tile = extract(map, tiles[i], 255);
                if (c.classify(tile, tiles[i]).label == Label::buildings) ++positives;
            }
            counts.push_back(positives);
        }
        for (size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] <= counts[i - 1]);
    }
}

TEST_CASE("heuristic segmenter reconstructs hatched rects") {
    SynthParams p;
    p.seed = 42;
    auto [map, truth] = generate(p);
    auto truth_ptr = std::make_shared<GroundTruth>(truth);
    OracleSegmenter oracle(truth_ptr);
    HeuristicSegmenter heuristic;

    bool checked = false;
    for (const auto& t : tile_grid(p.width, p.height, 256, 256)) {
        for (const auto& b : truth.buildings) {
            if (b.rect.x0 >= t.rect.x0 && b.rect.x1() <= t.rect.x1() &&
                b.rect.y0 >= t.rect.y0 && b.rect.y1() <= t.rect.y1()) {
                const Raster tile = extract(map, t, 255);
                const BinaryMask predicted = heuristic.segment(tile, t);
                const BinaryMask expected = oracle.segment(tile, t);
                CHECK(dice(predicted, expected) >= 0.85);
                checked = true;
            }
        }
    }
    CHECK(checked);

    SUBCASE("blank tile gives an empty mask") {
        const Raster blank(128, 128, 255);
        CHECK_FALSE(heuristic.segment(blank, dummy_ref(128, 128)).any());
    }
}

TEST_CASE("oracle classifier") {
    SynthParams p;
    p.seed = 7;
    auto [map, truth] = generate(p);
    auto truth_ptr = std::make_shared<GroundTruth>(truth);
    const Raster dummy(8, 8, 255);

    SUBCASE("zero error model is exact") {
        OracleClassifier cls(truth_ptr);
        for (const auto& t : tile_grid(p.width, p.height, 256, 256)) {
            const Verdict v = cls.classify(dummy, t);
            const bool expected = truth_tile_label(truth, t);
            CHECK((v.label == Label::buildings) == expected);
            CHECK(v.confidence == (expected ? 1.0 : 0.0));
        }
    }
    SUBCASE("sliver tiles are missed deterministically with a full edge penalty") {
        ErrorModel em;
        em.edge_penalty = 1.0;
        em.frac_floor = 0.002;
        OracleClassifier cls(truth_ptr, em);
        // tile overlapping 3 columns x 1 row of the first building:
        // fraction 3/65536 < 0.002
        const auto& b = truth.buildings.front().rect;
        const TileRef sliver{2, 100, 100, {b.x0 - 253, b.y0 - 255, 256, 256}};
        REQUIRE(truth_tile_label(truth, sliver));
        const Verdict v = cls.classify(dummy, sliver);
        CHECK(v.label == Label::no_buildings);
    }
    SUBCASE("error injection is stable across calls and independent of order") {
        ErrorModel em;
        em.fn_base = 0.5;
        em.fp_rate = 0.3;
        em.seed = 99;
        OracleClassifier cls(truth_ptr, em);
        const auto tiles = tile_grid(p.width, p.height, 256, 256);
        std::vector<Verdict> forward, backward;
        for (const auto& t : tiles) forward.push_back(cls.classify(dummy, t));
        for (auto it = tiles.rbegin(); it != tiles.rend(); ++it) {
            backward.push_back(cls.classify(dummy, *it));
        }
        for (size_t i = 0; i < tiles.size(); ++i) {
            CHECK(forward[i].label == backward[tiles.size() - 1 - i].label);
        }
    }
    SUBCASE("probabilities outside [0,1] are rejected") {
        ErrorModel em;
        em.fp_rate = 1.5;
        CHECK_THROWS_AS(OracleClassifier(truth_ptr, em), std::invalid_argument);
    }
}

TEST_CASE("oracle segmenter returns truth restricted to the tile") {
    SynthParams p;
    p.seed = 3;
    auto [map, truth] = generate(p);
    auto truth_ptr = std::make_shared<GroundTruth>(truth);
    OracleSegmenter seg(truth_ptr);
    REQUIRE_FALSE(truth.buildings.empty());
    const auto& b = truth.buildings.front().rect;
    const TileRef t{1, 0, 0, {b.x0 - 5, b.y0 - 5, b.w + 10, b.h + 10}};
    const Raster tile = extract(map, t, 255);
    const BinaryMask mask = seg.segment(tile, t);
    CHECK(static_cast<long long>(mask.count()) == b.area());
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const bool in_rect = (t.rect.x0 + x >= b.x0 && t.rect.x0 + x < b.x1() &&
                                  t.rect.y0 + y >= b.y0 && t.rect.y0 + y < b.y1());
            if (mask.at(x, y) != in_rect) FAIL("oracle mask mismatch");
        }
    }
}

TEST_CASE("external backend protocol") {
    const std::string stub = testutil::env_or_fail("CT_STUB_BACKEND");
    REQUIRE_FALSE(stub.empty());
    TempDir dir("extbackend");

    std::vector<Raster> tiles;
    std::vector<TileRef> refs;
    for (int i = 0; i < 3; ++i) {
        tiles.push_back(Raster(32, 32, i == 1 ? 0 : 255)); // middle tile dark
        refs.push_back(TileRef{1, 0, i, {32 * i, 0, 32, 32}});
    }

    SUBCASE("classifier batch round trip") {
        ExternalClassifier cls({stub, "dark"}, dir.path(), 0.5);
        const auto verdicts = cls.classify_batch(tiles, refs);
        REQUIRE(verdicts.size() == 3);
        CHECK(verdicts[0].label == Label::no_buildings);
        CHECK(verdicts[1].label == Label::buildings);
        CHECK(verdicts[2].label == Label::no_buildings);
    }
    SUBCASE("confidence 0.5268 with tau 0.5 reads buildings") {
        ExternalClassifier cls({stub, "conf:0.5268"}, dir.path(), 0.5);
        const Verdict v = cls.classify(tiles[0], refs[0]);
        CHECK(v.label == Label::buildings);
        CHECK(v.confidence == doctest::Approx(0.5268));
    }
    SUBCASE("missing tile id is a hard error naming the tile") {
        ExternalClassifier cls({stub, "drop-first"}, dir.path(), 0.5);
        try {
            cls.classify_batch(tiles, refs);
            FAIL("expected BackendError");
        } catch (const BackendError& e) {
            CHECK(std::string(e.what()).find(tile_id(refs[0])) != std::string::npos);
        }
    }
    SUBCASE("malformed response line") {
        ExternalClassifier cls({stub, "garbage"}, dir.path(), 0.5);
        CHECK_THROWS_AS(cls.classify_batch(tiles, refs), BackendError);
    }
    SUBCASE("nonzero exit is fatal") {
        ExternalClassifier cls({stub, "fail"}, dir.path(), 0.5);
        CHECK_THROWS_AS(cls.classify_batch(tiles, refs), BackendError);
    }
    SUBCASE("segmenter masks round trip") {
        ExternalSegmenter seg({stub, "segment-dark"}, dir.path());
        const auto masks = seg.segment_batch(tiles, refs);
        REQUIRE(masks.size() == 3);
        CHECK_FALSE(masks[0].any());
        CHECK(masks[1].count() == 32 * 32);
        CHECK_FALSE(masks[2].any());
    }
    SUBCASE("empty segmenter stub") {
        ExternalSegmenter seg({stub, "segment-empty"}, dir.path());
        const auto masks = seg.segment_batch(tiles, refs);
        for (const auto& m : masks) CHECK_FALSE(m.any());
    }
}

TEST_CASE("an all-positive external classifier reproduces full segmentation") {
    const std::string stub = testutil::env_or_fail("CT_STUB_BACKEND");
    REQUIRE_FALSE(stub.empty());
    TempDir dir("extcascade");

    SynthParams p;
    p.seed = 44;
    p.width = 1792;
    p.height = 768;
    auto [map, truth] = generate(p);
    auto truth_ptr = std::make_shared<const GroundTruth>(truth);
    auto segmenter = std::make_shared<OracleSegmenter>(truth_ptr);

    CascadeConfig cfg;
    cfg.schedule = {{1792, 768}, {256, 256}};
    cfg.classifiers = {std::make_shared<ExternalClassifier>(
                           std::vector<std::string>{stub, "allpos"}, dir.path(), 0.5),
                       std::make_shared<ExternalClassifier>(
                           std::vector<std::string>{stub, "allpos"}, dir.path(), 0.5)};
    cfg.segmenter = segmenter;
    const auto cascade = run_cascade(map, cfg);
    const auto baseline = segment_everything(map, {256, 256}, segmenter);

    REQUIRE(cascade.masks.size() == baseline.masks.size());
    auto it = baseline.masks.begin();
    for (const auto& [ref, mask] : cascade.masks) {
        CHECK(ref.rect == it->first.rect);
        CHECK(mask.bits == it->second.bits);
        ++it;
    }
    // batch exchange directories are cleaned up afterwards
    size_t leftovers = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) {
        ++leftovers;
    }
    CHECK(leftovers == 0);
}

TEST_CASE("verdict thresholding") {
    CHECK(make_verdict(0.5268, 0.5).label == Label::buildings);
    CHECK(make_verdict(0.5, 0.5).label == Label::buildings); // >= tau
    CHECK(make_verdict(0.4999, 0.5).label == Label::no_buildings);
    CHECK(make_verdict(0.36, 0.35).label == Label::buildings);
}
