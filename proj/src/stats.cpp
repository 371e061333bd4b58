#include "emopanel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace emopanel {

namespace {

std::vector<double> sorted_present(const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs)
    if (!is_missing(x)) out.push_back(x);
  std::sort(out.begin(), out.end());
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return kMissing;
  if (sorted.size() == 1) return sorted[0];
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

}  // namespace

double mean_of(const std::vector<double>& xs) {
  double s = 0;
  std::size_t n = 0;
  for (double x : xs)
    if (!is_missing(x)) {
      s += x;
      ++n;
    }
  return n ? s / static_cast<double>(n) : kMissing;
}

double sample_sd(const std::vector<double>& xs) {
  double s = 0;
  std::size_t n = 0;
  for (double x : xs)
    if (!is_missing(x)) {
      s += x;
      ++n;
    }
  if (n < 2) return kMissing;
  const double m = s / static_cast<double>(n);
  double ss = 0;
  for (double x : xs)
    if (!is_missing(x)) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double quantile(const std::vector<double>& xs, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile: p outside [0,1]");
  return quantile_sorted(sorted_present(xs), p);
}

WinsorBounds winsor_bounds(const std::vector<double>& xs, double lower_p, double upper_p) {
  if (!(lower_p >= 0.0 && lower_p < upper_p && upper_p <= 1.0))
    throw std::invalid_argument("winsorize: bounds must satisfy 0 <= lower < upper <= 1");
  const std::vector<double> sorted = sorted_present(xs);
  if (sorted.size() < 2) throw std::invalid_argument("winsorize: fewer than 2 non-missing values");
  const double n1 = static_cast<double>(sorted.size() - 1);
  // Snap inward to attained order statistics (see header).
  const std::size_t lo_idx = static_cast<std::size_t>(std::ceil(lower_p * n1));
  const std::size_t hi_idx = static_cast<std::size_t>(std::floor(upper_p * n1));
  return {sorted[lo_idx], sorted[hi_idx]};
}

std::vector<double> winsorize(const std::vector<double>& xs, double lower_p, double upper_p) {
  const WinsorBounds b = winsor_bounds(xs, lower_p, upper_p);
  std::vector<double> out = xs;
  for (double& x : out) {
    if (is_missing(x)) continue;
    if (x < b.lower)
      x = b.lower;
    else if (x > b.upper)
      x = b.upper;
  }
  return out;
}

std::vector<double> make_percentile_dummy(const std::vector<double>& xs, int percentile,
                                          DummySide side) {
  const double q = quantile(xs, static_cast<double>(percentile) / 100.0);
  std::vector<double> out(xs.size(), kMissing);
  if (is_missing(q)) return out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (is_missing(xs[i])) continue;
    const bool hit = side == DummySide::below ? xs[i] <= q : xs[i] >= q;
    out[i] = hit ? 1.0 : 0.0;
  }
  return out;
}

PairCorrelation pearson(const std::vector<double>& x, const std::vector<double>& y) {
  PairCorrelation out;
  const std::size_t n = std::min(x.size(), y.size());
  double sx = 0, sy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_missing(x[i]) && !is_missing(y[i])) {
      sx += x[i];
      sy += y[i];
      ++k;
    }
  if (k < 3) return out;
  const double mx = sx / static_cast<double>(k), my = sy / static_cast<double>(k);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_missing(x[i]) && !is_missing(y[i])) {
      const double dx = x[i] - mx, dy = y[i] - my;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
  out.n = k;
  if (sxx <= 0.0 || syy <= 0.0) return out;  // zero variance: undefined
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);
  out.r = r;
  const double dof = static_cast<double>(k - 2);
  if (std::abs(r) >= 1.0) {
    out.p = 0.0;
  } else {
    const double t = r * std::sqrt(dof / (1.0 - r * r));
    out.p = two_sided_p(t, dof);
  }
  return out;
}

double two_sided_p(double t, double dof) {
  if (is_missing(t) || dof <= 0) return kMissing;
  if (std::isinf(t)) return 0.0;
  boost::math::students_t_distribution<double> dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double t_quantile(double prob, double dof) {
  boost::math::students_t_distribution<double> dist(dof);
  return boost::math::quantile(dist, prob);
}

}  // namespace emopanel
