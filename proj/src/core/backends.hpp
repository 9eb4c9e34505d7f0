#pragma once

#include "core/pyramid.hpp"
#include "core/raster.hpp"
#include "core/synthmap.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctiler {

enum class Label { no_buildings, buildings };

/// Classifier output. label is always confidence >= tau for the tau the
/// verdict was made with, so the two never disagree.
struct Verdict {
    Label label = Label::no_buildings;
    double confidence = 0.0;
};

inline Verdict make_verdict(double confidence, double tau) {
    return {confidence >= tau ? Label::buildings : Label::no_buildings, confidence};
}

/// Error injection for oracle classifiers. A truly positive tile passes with
/// probability 1 - (fn_base + edge_penalty * [building fraction < frac_floor]);
/// a truly negative tile passes with probability fp_rate. Randomness is hashed
/// from (seed, level, row, col), so outcomes do not depend on traversal order
/// or worker count.
struct ErrorModel {
    double fp_rate = 0.0;
    double fn_base = 0.0;
    double edge_penalty = 0.0;
    double frac_floor = 0.0;
    uint64_t seed = 0;
};

void validate_error_model(const ErrorModel& em);

/// Tile classifier contract. Implementations must be deterministic for fixed
/// state and seed, and safe to call concurrently on distinct tiles.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual Verdict classify(const Raster& tile, const TileRef& ref) const = 0;

    /// Expected tile dimensions, when the backend is tied to one level.
    virtual std::optional<Extent> expected_dims() const { return std::nullopt; }

    /// External-process backends answer a whole level in one exchange.
    virtual bool prefers_batch() const { return false; }
    virtual std::vector<Verdict> classify_batch(const std::vector<Raster>& tiles,
                                                const std::vector<TileRef>& refs) const;

protected:
    void check_dims(const Raster& tile, const TileRef& ref) const;
};

/// Tile segmenter contract; mask dimensions always equal tile dimensions.
class Segmenter {
public:
    virtual ~Segmenter() = default;

    virtual BinaryMask segment(const Raster& tile, const TileRef& ref) const = 0;

    virtual std::optional<Extent> expected_dims() const { return std::nullopt; }

    virtual bool prefers_batch() const { return false; }
    virtual std::vector<BinaryMask> segment_batch(const std::vector<Raster>& tiles,
                                                  const std::vector<TileRef>& refs) const;

protected:
    void check_dims(const Raster& tile, const TileRef& ref) const;
};

/// Fraction of interior pixels that are dark (< 128) and have at least one
/// dark 4-neighbour within distance 2 in the horizontal direction and one in
/// the vertical direction. A crude cross-hatch indicator: isolated strokes in
/// a single direction score zero, hatched fills score high. Returns 0 when
/// the tile has no interior (dims <= 4).
double hatch_response(const Raster& tile);

/// Per-pixel version of the same predicate (out-of-bounds neighbours count as
/// paper), then an 8-connected morphological closing with a 3x3 kernel. The
/// built-in reference segmenter.
BinaryMask hatch_segment(const Raster& tile);

/// Hatch-response classifier: buildings iff response >= rho. Confidence is
/// min(1, response / (2 rho)), which crosses 0.5 exactly at rho.
class HeuristicClassifier : public Classifier {
public:
    explicit HeuristicClassifier(double tau = 0.5, double rho = 0.002,
                                 std::optional<Extent> dims = std::nullopt);
    Verdict classify(const Raster& tile, const TileRef& ref) const override;
    std::optional<Extent> expected_dims() const override { return dims_; }

private:
    double tau_;
    double rho_;
    std::optional<Extent> dims_;
};

class HeuristicSegmenter : public Segmenter {
public:
    explicit HeuristicSegmenter(std::optional<Extent> dims = std::nullopt) : dims_(dims) {}
    BinaryMask segment(const Raster& tile, const TileRef& ref) const override;
    std::optional<Extent> expected_dims() const override { return dims_; }

private:
    std::optional<Extent> dims_;
};

/// Ground-truth classifier with optional error injection. Passing tiles get
/// confidence 1, failing tiles 0, so any threshold in (0, 1] reads them back
/// identically.
class OracleClassifier : public Classifier {
public:
    OracleClassifier(std::shared_ptr<const GroundTruth> truth, ErrorModel em = {});
    Verdict classify(const Raster& tile, const TileRef& ref) const override;

private:
    std::shared_ptr<const GroundTruth> truth_;
    ErrorModel em_;
};

/// Ground truth restricted to the tile rect; out-of-map padding is negative.
class OracleSegmenter : public Segmenter {
public:
    explicit OracleSegmenter(std::shared_ptr<const GroundTruth> truth);
    BinaryMask segment(const Raster& tile, const TileRef& ref) const override;

private:
    std::shared_ptr<const GroundTruth> truth_;
};

/// Labels every tile with a fixed confidence. With confidence 1 this disables
/// filtering entirely (the segment-everything baseline).
class FixedClassifier : public Classifier {
public:
    explicit FixedClassifier(double confidence, double tau = 0.5)
        : confidence_(confidence), tau_(tau) {}
    Verdict classify(const Raster&, const TileRef&) const override {
        return make_verdict(confidence_, tau_);
    }

private:
    double confidence_;
    double tau_;
};

// --- external process backends -------------------------------------------
//
// Batch protocol, bit-exact:
//   request manifest: one line per tile, `tile_id<TAB>png_path`
//   classifier response: `tile_id<TAB>label<TAB>confidence`, label in {1,0}
//   segmenter response: `tile_id<TAB>mask_png_path`
// The command is invoked as `cmd <manifest> <response>`; a nonzero exit is
// fatal. Every requested tile id must appear in the response.

std::string tile_id(const TileRef& ref);

class ExternalClassifier : public Classifier {
public:
    /// argv: command and fixed leading arguments; manifest/response paths are
    /// appended per batch. work_dir holds the exchanged files.
    ExternalClassifier(std::vector<std::string> argv, std::filesystem::path work_dir,
                       double tau = 0.5);
    Verdict classify(const Raster& tile, const TileRef& ref) const override;
    bool prefers_batch() const override { return true; }
    std::vector<Verdict> classify_batch(const std::vector<Raster>& tiles,
                                        const std::vector<TileRef>& refs) const override;

private:
    std::vector<std::string> argv_;
    std::filesystem::path work_dir_;
    double tau_;
};

class ExternalSegmenter : public Segmenter {
public:
    ExternalSegmenter(std::vector<std::string> argv, std::filesystem::path work_dir);
    BinaryMask segment(const Raster& tile, const TileRef& ref) const override;
    bool prefers_batch() const override { return true; }
    std::vector<BinaryMask> segment_batch(const std::vector<Raster>& tiles,
                                          const std::vector<TileRef>& refs) const override;

private:
    std::vector<std::string> argv_;
    std::filesystem::path work_dir_;
};

} // namespace ctiler
