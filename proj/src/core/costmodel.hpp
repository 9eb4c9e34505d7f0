#pragma once

namespace ctiler {

struct RunStats;

/// Closed-form cost model of a classify-then-segment cascade. Normalization
/// convention, fixed throughout: per-pixel segmentation time t_s = 1 and
/// per-pixel classification time t_c = 1/A, where A is the cost ratio
/// t_s / t_c and R the fraction of tiles that pass a classifier.
struct CostParams {
    double pass_fraction = 0.4; // R
    double cost_ratio = 5.0;    // A

    double t_c() const { return 1.0 / cost_ratio; }
    static constexpr double t_s() { return 1.0; }
};

/// Predicted per-pixel time for an n-level cascade:
///   T(n) = sum_{i=0}^{n-1} R^i t_c  +  R^n t_s.
/// T(0) = 1 for every valid (R, A).
double normalized_time(int n, double pass_fraction, double cost_ratio);

/// Largest pass fraction at which adding classifiers still pays: 1 - 1/A.
/// Negative for A < 1 (classification costs more than it saves).
double break_even_limit(double cost_ratio);

/// True iff R < 1 - 1/A, i.e. iff normalized_time strictly decreases with
/// each added level (strictly, for R > 0).
bool is_beneficial(double pass_fraction, double cost_ratio);

/// Limit of normalized_time as n -> infinity: t_c / (1 - R). Requires R < 1.
double asymptotic_time(double pass_fraction, double cost_ratio);

/// Empirical parameters from a finished run: R is the level-1 pass fraction,
/// A the measured per-pixel segmentation/classification time ratio.
CostParams estimate_params(const RunStats& stats);

} // namespace ctiler
