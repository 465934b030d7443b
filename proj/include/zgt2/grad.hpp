#pragma once

// Composite dual-focused loss (log-cosh accuracy term + pinball terms on the
// alpha_0 type-reduced set) and its exact gradient with respect to the raw
// parameters, plus a finite-difference oracle.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "zgt2/matrix.hpp"
#include "zgt2/params.hpp"

namespace zgt2 {

/// Quantile levels supervising the lower and upper interval bounds.
struct Quantiles {
  double lower = 0.005;
  double upper = 0.995;

  void validate() const;
};

struct LossOptions {
  Quantiles quantiles;
  bool interval_terms = true;
};

struct LossBreakdown {
  double total = 0.0;
  double accuracy = 0.0;  // mean log-cosh
  double pinball = 0.0;   // mean interval term
};

/// A set of samples: rows of `features` selected by `rows` (all rows if empty).
struct BatchView {
  const Matrix& features;
  std::span<const double> targets;
  std::span<const std::size_t> rows = {};

  std::size_t size() const noexcept { return rows.empty() ? targets.size() : rows.size(); }
  std::size_t row(std::size_t i) const noexcept { return rows.empty() ? i : rows[i]; }
};

/// ln cosh(eps) as |eps| + ln((1 + exp(-2|eps|)) / 2); never overflows.
double log_cosh(double eps);

/// max(tau r, (tau - 1) r) for residual r = y - prediction.
double pinball(double residual, double tau);

/// Derivative of pinball with respect to the residual; tau at r = 0.
double pinball_slope(double residual, double tau);

/// Mean loss over the batch without gradients.
LossBreakdown evaluate_loss(const RawParams& raw, const BatchView& batch, const ModelConfig& config,
                            const LossOptions& options = {});

/// Mean loss and its gradient with respect to raw.values. KM switch points
/// and pinball branches are fixed at their forward-pass values. Throws
/// DivergenceError when the loss or gradient is non-finite.
LossBreakdown loss_and_grad(const RawParams& raw, const BatchView& batch, const ModelConfig& config,
                            const LossOptions& options, std::vector<double>& gradient);

/// Central differences of an arbitrary scalar function.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> theta, double step);

/// Central differences of the model loss. Uses only forward evaluations.
std::vector<double> finite_diff_grad(const RawParams& raw, const BatchView& batch,
                                     const ModelConfig& config, const LossOptions& options,
                                     double step);

/// Discrete state of the piecewise-smooth loss: KM selections per plane and
/// side, and the pinball branch of each interval term. Two parameter values
/// with equal signatures lie on the same smooth piece.
std::vector<std::uint8_t> branch_signature(const RawParams& raw, const BatchView& batch,
                                           const ModelConfig& config, const LossOptions& options);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::string worst_group;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;  // coordinates within kink_radius of a branch change
};

/// Relative error |g - fd| / max(|g|, |fd|, floor).
inline constexpr double kGradCheckFloor = 1e-5;

/// Compares `analytic` against central differences of the loss. Coordinates
/// whose branch signature changes within +-kink_radius are excluded.
GradientCheck check_gradient(const RawParams& raw, const BatchView& batch,
                             const ModelConfig& config, const LossOptions& options,
                             std::span<const double> analytic, double step = 1e-6,
                             double kink_radius = 1e-5);

}  // namespace zgt2
