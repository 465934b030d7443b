#include "zgt2/membership.hpp"

#include <string>

#include "zgt2/error.hpp"

namespace zgt2 {

double alpha_cut_radius(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ParameterDomainError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  // -2 ln(1) is -0.0 in some libms.
  const double v = -2.0 * std::log(alpha);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

AlphaPlaneGrid::AlphaPlaneGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  for (double a : levels_) weight_sum_ += a;
}

AlphaPlaneGrid AlphaPlaneGrid::uniform(int k) {
  if (k < 1) throw ConfigError("a uniform alpha grid needs K >= 1");
  std::vector<double> levels(static_cast<std::size_t>(k) + 1);
  levels[0] = kAlphaFloor;
  for (int i = 1; i <= k; ++i) levels[static_cast<std::size_t>(i)] = static_cast<double>(i) / k;
  return AlphaPlaneGrid(std::move(levels));
}

AlphaPlaneGrid AlphaPlaneGrid::single_plane() { return AlphaPlaneGrid({1.0}); }

double eval_pmf_scaled(double x, double center, double sigma, int input_dim) {
  if (!(sigma > 0.0)) {
    throw ParameterDomainError("PMF sigma must be positive, got " + std::to_string(sigma));
  }
  if (input_dim < 1) throw ParameterDomainError("input dimension must be >= 1");
  const double d = x - center;
  return std::exp(-d * d / (2.0 * input_dim * sigma * sigma));
}

MembershipBounds zadeh_alpha_bounds(double gamma, double sigma_left, double sigma_right,
                                    double alpha) {
  if (!(alpha >= kAlphaFloor) || alpha > 1.0) {
    throw ParameterDomainError("alpha must lie in [0.01, 1], got " + std::to_string(alpha));
  }
  if (gamma < 0.0 || gamma > 1.0) throw ParameterDomainError("gamma must lie in [0, 1]");
  if (sigma_left < 0.0 || sigma_right < 0.0) {
    throw ParameterDomainError("SMF deviations must be non-negative");
  }
  const double r = alpha_cut_radius(alpha);
  return {gamma - r * sigma_left, gamma + r * sigma_right};
}

double eval_smf(double u, double gamma, double sigma_left, double sigma_right) {
  if (sigma_left < 0.0 || sigma_right < 0.0) {
    throw ParameterDomainError("SMF deviations must be non-negative");
  }
  if (u == gamma) return 1.0;
  const double s = u < gamma ? sigma_left : sigma_right;
  if (s == 0.0) return 0.0;
  const double d = u - gamma;
  return std::exp(-d * d / (2.0 * s * s));
}

MembershipBounds zadeh_smf_sigmas(double gamma, double left_scale, double right_scale) {
  return {gamma / kAlphaFloorRadius * left_scale, (1.0 - gamma) / kAlphaFloorRadius * right_scale};
}

MembershipBounds mj_pmf_bounds(double x, const MJAntecedentDim& dim, int input_dim) {
  if (!(dim.sigma_lower > 0.0) || dim.sigma_lower > dim.sigma_upper) {
    throw ParameterDomainError("MJ antecedent needs 0 < sigma_lower <= sigma_upper");
  }
  if (dim.height < 0.0 || dim.height > 1.0) {
    throw ParameterDomainError("MJ LMF height must lie in [0, 1]");
  }
  return {dim.height * eval_pmf_scaled(x, dim.center, dim.sigma_lower, input_dim),
          eval_pmf_scaled(x, dim.center, dim.sigma_upper, input_dim)};
}

MembershipBounds mj_alpha_bounds(double lmf0, double umf0, double alpha, double delta1,
                                 double delta2) {
  if (lmf0 < 0.0 || lmf0 > umf0 || umf0 > 1.0) {
    throw ParameterDomainError("MJ PMF bounds need 0 <= lmf <= umf <= 1");
  }
  if (delta1 < 0.0 || delta1 > 1.0 || delta2 < 0.0 || delta2 > 1.0) {
    throw ParameterDomainError("MJ SMF shape parameters must lie in [0, 1]");
  }
  if (alpha < 0.0 || alpha > 1.0) throw ParameterDomainError("alpha must lie in [0, 1]");
  // The plane stays ordered iff alpha (1 + delta1 - delta2) <= 1, which holds
  // for every alpha exactly when delta1 <= delta2.
  if (alpha * (1.0 + delta1 - delta2) > 1.0 + 1e-12) {
    throw ParameterDomainError("MJ SMF shape inverts this alpha-plane (needs delta1 <= delta2)");
  }
  return detail::mj_plane(lmf0, umf0, alpha, delta1, delta2);
}

}  // namespace zgt2
