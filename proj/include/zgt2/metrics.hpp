#pragma once

#include <span>

namespace zgt2 {

/// Root mean square error. Throws ShapeError on empty or mismatched input.
double rmse(std::span<const double> y_true, std::span<const double> y_pred);

/// Fraction of targets inside the closed interval [lo, hi].
double picp(std::span<const double> y_true, std::span<const double> lo,
            std::span<const double> hi);

/// Mean interval width over the range of the targets.
double pinaw(std::span<const double> y_true, std::span<const double> lo,
             std::span<const double> hi);

/// Distribution summary of one metric over seeds.
struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for a single value
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Quartiles use linear interpolation between order statistics.
Summary summarize(std::span<const double> values);

}  // namespace zgt2
