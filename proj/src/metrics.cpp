#include "zgt2/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "zgt2/error.hpp"

namespace zgt2 {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a == 0) throw ShapeError("metric needs at least one sample");
  if (a != b) throw ShapeError("metric inputs differ in length");
}

void check_interval(std::span<const double> y, std::span<const double> lo,
                    std::span<const double> hi) {
  check_lengths(y.size(), lo.size());
  check_lengths(y.size(), hi.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (lo[i] > hi[i]) throw ParameterDomainError("interval lower bound exceeds upper bound");
  }
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  return i + 1 < v.size() ? v[i] + frac * (v[i + 1] - v[i]) : v[i];
}

}  // namespace

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_true[i] - y_pred[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(y_true.size()));
}

double picp(std::span<const double> y_true, std::span<const double> lo,
            std::span<const double> hi) {
  check_interval(y_true, lo, hi);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    inside += lo[i] <= y_true[i] && y_true[i] <= hi[i];
  }
  return static_cast<double>(inside) / static_cast<double>(y_true.size());
}

double pinaw(std::span<const double> y_true, std::span<const double> lo,
             std::span<const double> hi) {
  check_interval(y_true, lo, hi);
  const auto [mn, mx] = std::minmax_element(y_true.begin(), y_true.end());
  const double range = *mx - *mn;
  if (!(range > 0.0)) throw ParameterDomainError("PINAW needs a non-zero target range");
  double width = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) width += hi[i] - lo[i];
  return width / static_cast<double>(lo.size()) / range;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw ShapeError("cannot summarise an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  Summary s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  s.min = v.front();
  s.max = v.back();
  s.median = quantile_sorted(v, 0.5);
  s.q25 = quantile_sorted(v, 0.25);
  s.q75 = quantile_sorted(v, 0.75);
  return s;
}

}  // namespace zgt2
