#pragma once

#include "core/raster.hpp"
#include "core/stitch.hpp"

#include <utility>
#include <vector>

namespace ctiler {

using Point = std::pair<double, double>;

/// One matched (detection, truth) pair and its distance.
struct MatchPair {
    int detection = 0;
    int truth = 0;
    double distance = 0.0;
};

struct MatchResult {
    int tp = 0;
    int fp = 0;
    int fn = 0;
    std::vector<MatchPair> pairs;
};

/// Greedy matching by ascending pair distance, ties broken by (truth index,
/// detection index); pairs beyond radius are never considered. Each truth and
/// each detection lands in at most one pair.
MatchResult match(const std::vector<Point>& detections, const std::vector<Point>& truths,
                  double radius);
MatchResult match(const std::vector<Detection>& detections, const std::vector<Point>& truths,
                  double radius);

/// 2tp / (2tp + fp + fn); 1.0 when all three counts are zero.
double f1_score(long long tp, long long fp, long long fn);
double precision(long long tp, long long fp);
double recall(long long tp, long long fn);

/// 2|a∩b| / (|a|+|b|); 1.0 when both masks are empty. Dimensions must match.
double dice(const BinaryMask& a, const BinaryMask& b);

struct ChangeCluster {
    int size = 0;
    double cx = 0.0; // mean of member world coordinates
    double cy = 0.0;
    std::vector<int> members; // indices into the source epoch's detections
};

struct ChangeReport {
    std::vector<ChangeCluster> disappeared; // in A, unmatched in B
    std::vector<ChangeCluster> appeared;    // in B, unmatched in A
};

/// Two-epoch comparison in world coordinates: detections of one epoch with no
/// counterpart within radius in the other are grouped by single-linkage
/// clustering at cluster_dist. Clusters are sorted by size descending.
/// Throws when any detection lacks world coordinates.
ChangeReport change_detect(const std::vector<Detection>& epoch_a,
                           const std::vector<Detection>& epoch_b, double radius,
                           double cluster_dist);

} // namespace ctiler
