#include "core/costmodel.hpp"

#include "core/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace ctiler {

namespace {

void check_domain(double pass_fraction, double cost_ratio) {
    if (!(pass_fraction >= 0.0 && pass_fraction <= 1.0)) {
        throw std::invalid_argument("pass fraction R must lie in [0, 1]");
    }
    if (!(cost_ratio > 0.0)) {
        throw std::invalid_argument("cost ratio A must be positive");
    }
}

} // namespace

double normalized_time(int n, double pass_fraction, double cost_ratio) {
    if (n < 0) throw std::invalid_argument("cascade depth n must be >= 0");
    check_domain(pass_fraction, cost_ratio);
    const double t_c = 1.0 / cost_ratio;
    double total = 0.0;
    double r_pow = 1.0;
    for (int i = 0; i < n; ++i) {
        total += r_pow * t_c;
        r_pow *= pass_fraction;
    }
    return total + r_pow; // + R^n * t_s with t_s = 1
}

double break_even_limit(double cost_ratio) {
    if (!(cost_ratio > 0.0)) throw std::invalid_argument("cost ratio A must be positive");
    return 1.0 - 1.0 / cost_ratio;
}

bool is_beneficial(double pass_fraction, double cost_ratio) {
    check_domain(pass_fraction, cost_ratio);
    return pass_fraction < break_even_limit(cost_ratio);
}

double asymptotic_time(double pass_fraction, double cost_ratio) {
    check_domain(pass_fraction, cost_ratio);
    if (pass_fraction >= 1.0) {
        throw std::invalid_argument("asymptotic time requires R < 1");
    }
    return 1.0 / (cost_ratio * (1.0 - pass_fraction));
}

CostParams estimate_params(const RunStats& stats) {
    if (stats.levels.empty() || stats.levels.front().tiles_in == 0) {
        throw std::invalid_argument("parameter estimation needs level-1 tile counts");
    }
    long long class_px = 0;
    double class_ms = 0.0;
    for (const auto& lvl : stats.levels) {
        class_px += lvl.pixels;
        class_ms += lvl.wall_ms;
    }
    if (class_px == 0 || class_ms <= 0.0 || stats.segment_pixels == 0 ||
        stats.segment_wall_ms <= 0.0) {
        throw std::invalid_argument("parameter estimation needs nonzero pixel counts and timings");
    }
    CostParams params;
    params.pass_fraction = stats.levels.front().pass_fraction;
    const double t_c = class_ms / static_cast<double>(class_px);
    const double t_s = stats.segment_wall_ms / static_cast<double>(stats.segment_pixels);
    params.cost_ratio = t_s / t_c;
    return params;
}

} // namespace ctiler
