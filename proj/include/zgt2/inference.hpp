#pragma once

// Rule firing, TSK consequents, Karnik-Mendel type reduction and the
// alpha-weighted aggregate output.

#include <cstdint>
#include <span>
#include <vector>

#include "zgt2/matrix.hpp"
#include "zgt2/membership.hpp"
#include "zgt2/params.hpp"

namespace zgt2 {

struct FiringInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Type-reduced set [lower, upper] of one alpha plane.
struct TypeReducedSet {
  double lower = 0.0;
  double upper = 0.0;
};

/// Point output plus the alpha_0-plane type-reduced set used as the
/// prediction interval.
struct PredictionWithInterval {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// One side (lower or upper) of a Karnik-Mendel reduction. `uses_upper[p]`
/// records which firing endpoint rule p contributed at convergence; the
/// gradient treats that selection as fixed.
struct KmSide {
  double value = 0.0;
  double denominator = 0.0;
  std::size_t switch_point = 0;  // rules with y_p <= value (lower) / < value (upper)
  std::vector<std::uint8_t> uses_upper;
};

struct KmResult {
  KmSide lower;
  KmSide upper;
  /// Every upper firing was ~0; both bounds fall back to the unweighted mean.
  bool degenerate = false;
};

/// y_p = sum_m a_{p,m} x_m + a_{p,0}. `a` is P x M row-major.
std::vector<double> consequent_values(std::span<const double> x, std::span<const double> a,
                                      std::span<const double> a0);

/// Product t-norm over the M dimensions of each rule. `bounds` is P x M row-major.
std::vector<FiringInterval> rule_firings(std::span<const MembershipBounds> bounds, int rules,
                                         int inputs);

/// Exact extrema of sum f_p y_p / sum f_p over f_p in [lower_p, upper_p] via the
/// iterative Karnik-Mendel procedure.
TypeReducedSet km_type_reduce(std::span<const FiringInterval> firings, std::span<const double> y);
KmResult km_type_reduce_detailed(std::span<const FiringInterval> firings,
                                 std::span<const double> y);

/// sum_k alpha_k (lower_k + upper_k)/2 / sum_k alpha_k. alpha_0 = 0.01 carries
/// its own weight.
double alpha_plane_output(std::span<const TypeReducedSet> planes, const AlphaPlaneGrid& grid);

/// Intermediate values of one forward evaluation, kept for the backward pass.
struct ForwardPass {
  std::vector<double> gauss;        // P*M PMF grades (UMF Gaussian for IT2-HS)
  std::vector<double> gauss_lower;  // P*M, IT2-HS LMF Gaussian
  std::vector<MembershipBounds> bounds;  // planes * P*M
  std::vector<FiringInterval> firings;   // planes * P
  std::vector<double> consequents;       // P
  std::vector<KmResult> reductions;      // planes
  PredictionWithInterval prediction;
};

/// Full forward evaluation of one input vector.
void forward(std::span<const double> x, const ConstrainedParams& params, const ModelConfig& config,
             const AlphaPlaneGrid& grid, ForwardPass& pass);

PredictionWithInterval predict(std::span<const double> x, const ConstrainedParams& params,
                               const ModelConfig& config);

std::vector<PredictionWithInterval> predict_batch(const Matrix& x, const ConstrainedParams& params,
                                                  const ModelConfig& config);

}  // namespace zgt2
