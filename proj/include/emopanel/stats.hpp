#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace emopanel {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double x) { return x != x; }

double mean_of(const std::vector<double>& xs);          // skips missing
double sample_sd(const std::vector<double>& xs);        // skips missing, n-1 denominator

// Quantile by linear interpolation between closest order statistics
// (the h = (n-1)p convention) over the non-missing values.
double quantile(const std::vector<double>& xs, double p);

// Winsorization clips at attained order statistics: the lower threshold is
// the smallest order statistic at or above the interpolated lower quantile,
// the upper the largest at or below the interpolated upper quantile. Clipping
// at attained values makes the operation exactly idempotent and preserves all
// interior order statistics. Missing values pass through.
struct WinsorBounds {
  double lower;
  double upper;
};
WinsorBounds winsor_bounds(const std::vector<double>& xs, double lower_p, double upper_p);
std::vector<double> winsorize(const std::vector<double>& xs, double lower_p = 0.001,
                              double upper_p = 0.999);

enum class DummySide { below, above };
// Pooled-sample percentile dummy: below emits 1 iff value <= Q(p/100),
// above emits 1 iff value >= Q(p/100). Missing stays missing.
std::vector<double> make_percentile_dummy(const std::vector<double>& xs, int percentile,
                                          DummySide side);

struct PairCorrelation {
  double r = kMissing;
  double p = kMissing;
  std::size_t n = 0;
};
// Pearson correlation over pairwise-complete rows, with the two-sided
// p-value from the t transform with n-2 degrees of freedom.
PairCorrelation pearson(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided p-value for a t statistic with the given degrees of freedom.
double two_sided_p(double t, double dof);
// Student-t quantile (inverse CDF) for CI construction.
double t_quantile(double prob, double dof);

}  // namespace emopanel
