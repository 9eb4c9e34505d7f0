#include "core/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ctiler {

namespace {

double dist(const Point& a, const Point& b) {
    return std::hypot(a.first - b.first, a.second - b.second);
}

} // namespace

MatchResult match(const std::vector<Point>& detections, const std::vector<Point>& truths,
                  double radius) {
    if (radius <= 0.0) throw std::invalid_argument("match radius must be positive");

    struct Candidate {
        double d;
        int truth;
        int det;
    };
    std::vector<Candidate> candidates;
    for (int t = 0; t < static_cast<int>(truths.size()); ++t) {
        for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
            const double dd = dist(detections[static_cast<size_t>(d)], truths[static_cast<size_t>(t)]);
            if (dd <= radius) candidates.push_back({dd, t, d});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.truth != b.truth) return a.truth < b.truth;
        return a.det < b.det;
    });

    std::vector<uint8_t> det_used(detections.size(), 0);
    std::vector<uint8_t> truth_used(truths.size(), 0);
    MatchResult result;
    for (const auto& c : candidates) {
        if (det_used[static_cast<size_t>(c.det)] || truth_used[static_cast<size_t>(c.truth)]) continue;
        det_used[static_cast<size_t>(c.det)] = 1;
        truth_used[static_cast<size_t>(c.truth)] = 1;
        result.pairs.push_back({c.det, c.truth, c.d});
    }
    result.tp = static_cast<int>(result.pairs.size());
    result.fp = static_cast<int>(detections.size()) - result.tp;
    result.fn = static_cast<int>(truths.size()) - result.tp;
    return result;
}

MatchResult match(const std::vector<Detection>& detections, const std::vector<Point>& truths,
                  double radius) {
    std::vector<Point> points;
    points.reserve(detections.size());
    for (const auto& d : detections) points.emplace_back(d.centroid_x, d.centroid_y);
    return match(points, truths, radius);
}

double f1_score(long long tp, long long fp, long long fn) {
    if (tp < 0 || fp < 0 || fn < 0) throw std::invalid_argument("counts must be >= 0");
    if (tp == 0 && fp == 0 && fn == 0) return 1.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double precision(long long tp, long long fp) {
    if (tp == 0 && fp == 0) return 1.0;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall(long long tp, long long fn) {
    if (tp == 0 && fn == 0) return 1.0;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double dice(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("dice requires masks of equal dimensions");
    }
    long long inter = 0;
    long long total = 0;
    for (size_t i = 0; i < a.bits.size(); ++i) {
        if (a.bits[i] && b.bits[i]) ++inter;
        total += a.bits[i] + b.bits[i];
    }
    if (total == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(total);
}

namespace {

std::vector<Point> world_points(const std::vector<Detection>& dets, const char* epoch) {
    std::vector<Point> out;
    out.reserve(dets.size());
    for (size_t i = 0; i < dets.size(); ++i) {
        if (!dets[i].world) {
            throw std::invalid_argument("change detection needs world coordinates; epoch " +
                                        std::string(epoch) + " detection " + std::to_string(i) +
                                        " has none");
        }
        out.push_back(*dets[i].world);
    }
    return out;
}

/// Indices of `from` with no counterpart in `against` within radius.
std::vector<int> unmatched(const std::vector<Point>& from, const std::vector<Point>& against,
                           double radius) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(from.size()); ++i) {
        bool found = false;
        for (const auto& p : against) {
            if (dist(from[static_cast<size_t>(i)], p) <= radius) {
                found = true;
                break;
            }
        }
        if (!found) out.push_back(i);
    }
    return out;
}

std::vector<ChangeCluster> cluster_single_linkage(const std::vector<Point>& points,
                                                  const std::vector<int>& indices,
                                                  double cluster_dist) {
    const int n = static_cast<int>(indices.size());
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (dist(points[static_cast<size_t>(indices[static_cast<size_t>(i)])],
                     points[static_cast<size_t>(indices[static_cast<size_t>(j)])]) <= cluster_dist) {
                parent[static_cast<size_t>(find(i))] = find(j);
            }
        }
    }

    std::map<int, ChangeCluster> by_root;
    for (int i = 0; i < n; ++i) {
        const int idx = indices[static_cast<size_t>(i)];
        ChangeCluster& c = by_root[find(i)];
        c.size += 1;
        c.cx += points[static_cast<size_t>(idx)].first;
        c.cy += points[static_cast<size_t>(idx)].second;
        c.members.push_back(idx);
    }
    std::vector<ChangeCluster> clusters;
    clusters.reserve(by_root.size());
    for (auto& [root, c] : by_root) {
        c.cx /= c.size;
        c.cy /= c.size;
        clusters.push_back(std::move(c));
    }
    std::sort(clusters.begin(), clusters.end(), [](const ChangeCluster& a, const ChangeCluster& b) {
        if (a.size != b.size) return a.size > b.size;
        if (a.cy != b.cy) return a.cy < b.cy;
        return a.cx < b.cx;
    });
    return clusters;
}

} // namespace

ChangeReport change_detect(const std::vector<Detection>& epoch_a,
                           const std::vector<Detection>& epoch_b, double radius,
                           double cluster_dist) {
    if (radius <= 0.0 || cluster_dist <= 0.0) {
        throw std::invalid_argument("radius and cluster_dist must be positive");
    }
    const auto points_a = world_points(epoch_a, "A");
    const auto points_b = world_points(epoch_b, "B");

    ChangeReport report;
    report.disappeared =
        cluster_single_linkage(points_a, unmatched(points_a, points_b, radius), cluster_dist);
    report.appeared =
        cluster_single_linkage(points_b, unmatched(points_b, points_a, radius), cluster_dist);
    return report;
}

} // namespace ctiler
