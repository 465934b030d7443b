#pragma once

// Primary and secondary membership functions for the Zadeh (Z-GT2) and
// Mendel-John (MJ-GT2 / IT2) antecedent families, plus alpha-plane bound
// extraction. Every function here is pure.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace zgt2 {

/// Lowest alpha level used by any plane. ln(0) is undefined, so the
/// alpha_0 plane is associated with this value instead of 0.
inline constexpr double kAlphaFloor = 0.01;

/// Half-width of an alpha-cut of a unit Gaussian: sqrt(-2 ln alpha).
double alpha_cut_radius(double alpha);

/// sqrt(-2 ln 0.01) ~= 3.03485. The exact value, never the rounded 3.
inline const double kAlphaFloorRadius = std::sqrt(-2.0 * std::log(kAlphaFloor));

/// Lower/upper membership grade pair of one alpha-plane at one input.
struct MembershipBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Zadeh antecedent for one (rule, dimension) pair. The SMF deviations are
/// absolute values here; the trainable model derives them per sample from
/// the PMF grade (see zadeh_smf_sigmas).
struct ZadehAntecedentDim {
  double center = 0.0;
  double pmf_sigma = 1.0;
  double smf_sigma_left = 0.0;
  double smf_sigma_right = 0.0;
};

/// Mendel-John antecedent for one (rule, dimension) pair.
struct MJAntecedentDim {
  double center = 0.0;
  double sigma_lower = 1.0;
  double sigma_upper = 1.0;
  double height = 1.0;
  double delta1 = 0.5;
  double delta2 = 0.5;
};

/// Uniform alpha levels alpha_k = k/K for k >= 1 with alpha_0 = 0.01.
class AlphaPlaneGrid {
 public:
  /// K+1 planes; K >= 1.
  static AlphaPlaneGrid uniform(int k);
  /// A single plane of level 1 (interval type-2 models).
  static AlphaPlaneGrid single_plane();

  std::span<const double> levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }
  /// Sum of all levels, alpha_0 included.
  double weight_sum() const noexcept { return weight_sum_; }

 private:
  explicit AlphaPlaneGrid(std::vector<double> levels);

  std::vector<double> levels_;
  double weight_sum_ = 0.0;
};

/// HTSK-scaled Gaussian PMF: exp(-(x-c)^2 / (2 (sqrt(M) sigma)^2)).
/// Throws ParameterDomainError for sigma <= 0 or input_dim < 1.
double eval_pmf_scaled(double x, double center, double sigma, int input_dim);

/// Alpha-cut of the two-sided Gaussian SMF centred at gamma.
/// Rejects alpha outside [0.01, 1] with ParameterDomainError.
MembershipBounds zadeh_alpha_bounds(double gamma, double sigma_left, double sigma_right,
                                    double alpha);

/// Two-sided Gaussian SMF. A zero deviation is a point mass on that side.
double eval_smf(double u, double gamma, double sigma_left, double sigma_right);

/// Absolute SMF deviations for PMF grade gamma from the sigmoid scales in
/// [0,1]: sigma_l = gamma/r0 * left_scale, sigma_r = (1-gamma)/r0 * right_scale
/// with r0 = sqrt(-2 ln 0.01). Keeps every alpha-cut inside [0,1].
MembershipBounds zadeh_smf_sigmas(double gamma, double left_scale, double right_scale);

/// alpha_0-plane (PMF) bounds of an MJ antecedent: (h * LMF Gaussian, UMF Gaussian),
/// both HTSK-scaled. Throws ParameterDomainError if the ordering constraints fail.
MembershipBounds mj_pmf_bounds(double x, const MJAntecedentDim& dim, int input_dim);

/// Alpha-plane of the MJ SMF: lmf0 + alpha s delta1, umf0 - alpha s (1 - delta2)
/// with s = umf0 - lmf0. alpha = 0 returns the PMF bounds unchanged. Every
/// plane is ordered when delta1 <= delta2; an inverted plane is a
/// ParameterDomainError.
MembershipBounds mj_alpha_bounds(double lmf0, double umf0, double alpha, double delta1,
                                 double delta2);

namespace detail {

/// mj_alpha_bounds without validation. The upper bound is evaluated as
/// lmf0 + s ((1 - alpha) + alpha delta2), which equals the textbook form but
/// avoids cancellation when delta2 is near 0; with delta1 <= delta2 the
/// result is then ordered exactly in floating point.
inline MembershipBounds mj_plane(double lmf0, double umf0, double alpha, double delta1,
                                 double delta2) noexcept {
  const double spread = umf0 - lmf0;
  const double upper = std::min(umf0, lmf0 + spread * ((1.0 - alpha) + alpha * delta2));
  return {std::min(lmf0 + spread * (alpha * delta1), upper), upper};
}

}  // namespace detail

}  // namespace zgt2
