#include "zgt2/inference.hpp"

#include <cmath>

#include "zgt2/error.hpp"

namespace zgt2 {

namespace {

constexpr double kDegenerateFiring = 1e-300;

// One side of classic KM. Comparing y_p against the current estimate is the
// same as locating the switch point in the ascending order of y_p; rules with
// y_p equal to the estimate do not move the weighted average, so ties resolve
// identically either way.
KmSide km_side(std::span<const FiringInterval> f, std::span<const double> y, bool lower_bound) {
  const std::size_t n = y.size();
  KmSide side;
  side.uses_upper.assign(n, 0);

  double num = 0.0;
  double den = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double w = 0.5 * (f[p].lower + f[p].upper);
    num += w * y[p];
    den += w;
  }
  double estimate = num / den;
  std::vector<std::uint8_t> select(n);
  bool have_selection = false;

  for (std::size_t iter = 0; iter < n + 2; ++iter) {
    for (std::size_t p = 0; p < n; ++p) {
      select[p] = lower_bound ? (y[p] <= estimate) : (y[p] >= estimate);
    }
    if (have_selection && select == side.uses_upper) break;
    num = 0.0;
    den = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double w = select[p] ? f[p].upper : f[p].lower;
      num += w * y[p];
      den += w;
    }
    if (!(den > 0.0)) break;  // rounding pushed every positive weight out; keep last
    side.uses_upper = select;
    side.denominator = den;
    estimate = num / den;
    have_selection = true;
  }

  if (!have_selection) {
    // Only reachable through rounding at a single distinct consequent value.
    for (std::size_t p = 0; p < n; ++p) side.uses_upper[p] = f[p].upper > 0.0;
    num = 0.0;
    den = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double w = side.uses_upper[p] ? f[p].upper : f[p].lower;
      num += w * y[p];
      den += w;
    }
    side.denominator = den;
    estimate = num / den;
  }
  side.value = estimate;
  for (std::size_t p = 0; p < n; ++p) {
    side.switch_point += lower_bound ? (y[p] <= estimate) : (y[p] < estimate);
  }
  return side;
}

}  // namespace

std::vector<double> consequent_values(std::span<const double> x, std::span<const double> a,
                                      std::span<const double> a0) {
  const std::size_t rules = a0.size();
  if (a.size() != rules * x.size()) throw ShapeError("consequent matrix must be P x M");
  std::vector<double> y(rules);
  for (std::size_t p = 0; p < rules; ++p) {
    double s = a0[p];
    for (std::size_t m = 0; m < x.size(); ++m) s += a[p * x.size() + m] * x[m];
    y[p] = s;
  }
  return y;
}

std::vector<FiringInterval> rule_firings(std::span<const MembershipBounds> bounds, int rules,
                                         int inputs) {
  const auto p_count = static_cast<std::size_t>(rules);
  const auto m_count = static_cast<std::size_t>(inputs);
  if (bounds.size() != p_count * m_count) throw ShapeError("membership bounds must be P x M");
  std::vector<FiringInterval> out(p_count);
  for (std::size_t p = 0; p < p_count; ++p) {
    double lo = 1.0;
    double hi = 1.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      lo *= bounds[p * m_count + m].lower;
      hi *= bounds[p * m_count + m].upper;
    }
    out[p] = {lo, hi};
  }
  return out;
}

KmResult km_type_reduce_detailed(std::span<const FiringInterval> firings,
                                 std::span<const double> y) {
  if (firings.size() != y.size()) throw ShapeError("firings and consequents differ in length");
  if (y.empty()) throw ShapeError("type reduction needs at least one rule");
  KmResult result;
  bool any_fired = false;
  for (const auto& f : firings) any_fired = any_fired || f.upper > kDegenerateFiring;
  if (!any_fired) {
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    result.degenerate = true;
    result.lower.value = result.upper.value = mean;
    result.lower.uses_upper.assign(y.size(), 0);
    result.upper.uses_upper.assign(y.size(), 0);
    return result;
  }
  result.lower = km_side(firings, y, true);
  result.upper = km_side(firings, y, false);
  return result;
}

TypeReducedSet km_type_reduce(std::span<const FiringInterval> firings, std::span<const double> y) {
  const auto r = km_type_reduce_detailed(firings, y);
  return {r.lower.value, r.upper.value};
}

double alpha_plane_output(std::span<const TypeReducedSet> planes, const AlphaPlaneGrid& grid) {
  if (grid.size() == 0) throw ConfigError("alpha grid is empty");
  if (planes.size() != grid.size()) throw ShapeError("one type-reduced set per alpha plane");
  double num = 0.0;
  for (std::size_t k = 0; k < planes.size(); ++k) {
    num += grid[k] * 0.5 * (planes[k].lower + planes[k].upper);
  }
  return num / grid.weight_sum();
}

void forward(std::span<const double> x, const ConstrainedParams& params, const ModelConfig& config,
             const AlphaPlaneGrid& grid, ForwardPass& pass) {
  const auto P = static_cast<std::size_t>(config.rules);
  const auto M = static_cast<std::size_t>(config.inputs);
  const std::size_t PM = P * M;
  const std::size_t planes = grid.size();
  if (x.size() != M) throw ShapeError("input vector length does not match the model");
  const double scale = 2.0 * static_cast<double>(M);

  pass.gauss.resize(PM);
  pass.bounds.resize(planes * PM);
  for (std::size_t i = 0; i < PM; ++i) {
    const double d = x[i % M] - params.center[i];
    pass.gauss[i] = std::exp(-d * d / (scale * params.sigma[i] * params.sigma[i]));
  }
  if (config.variant == Variant::kIT2HeightSigma) {
    pass.gauss_lower.resize(PM);
    for (std::size_t i = 0; i < PM; ++i) {
      const double d = x[i % M] - params.center[i];
      pass.gauss_lower[i] =
          std::exp(-d * d / (scale * params.sigma_lower[i] * params.sigma_lower[i]));
    }
  }

  switch (config.variant) {
    case Variant::kZadehGT2:
      for (std::size_t k = 0; k < planes; ++k) {
        // Alpha-cut radius relative to the alpha_0 radius, in [0, 1].
        const double w = k == 0 ? 1.0 : alpha_cut_radius(grid[k]) / kAlphaFloorRadius;
        for (std::size_t i = 0; i < PM; ++i) {
          const double g = pass.gauss[i];
          const std::size_t m = i % M;
          pass.bounds[k * PM + i] = {g * (1.0 - params.smf_left_scale[m] * w),
                                     g + (1.0 - g) * params.smf_right_scale[m] * w};
        }
      }
      break;
    case Variant::kMendelJohnGT2:
      for (std::size_t k = 0; k < planes; ++k) {
        // The alpha_0 plane is the PMF footprint itself.
        const double alpha = k == 0 ? 0.0 : grid[k];
        for (std::size_t i = 0; i < PM; ++i) {
          const double umf0 = pass.gauss[i];
          const double lmf0 = params.height[i] * umf0;
          const std::size_t m = i % M;
          pass.bounds[k * PM + i] =
              detail::mj_plane(lmf0, umf0, alpha, params.delta1[m], params.delta2[m]);
        }
      }
      break;
    case Variant::kIT2Height:
      for (std::size_t i = 0; i < PM; ++i) {
        pass.bounds[i] = {params.height[i] * pass.gauss[i], pass.gauss[i]};
      }
      break;
    case Variant::kIT2HeightSigma:
      for (std::size_t i = 0; i < PM; ++i) {
        pass.bounds[i] = {params.height[i] * pass.gauss_lower[i], pass.gauss[i]};
      }
      break;
  }

  pass.consequents = consequent_values(x, params.a, params.a0);
  pass.firings.resize(planes * P);
  pass.reductions.resize(planes);
  std::vector<TypeReducedSet> reduced(planes);
  for (std::size_t k = 0; k < planes; ++k) {
    const auto f = rule_firings(std::span(pass.bounds).subspan(k * PM, PM), config.rules,
                                config.inputs);
    std::copy(f.begin(), f.end(), pass.firings.begin() + static_cast<std::ptrdiff_t>(k * P));
    pass.reductions[k] = km_type_reduce_detailed(f, pass.consequents);
    reduced[k] = {pass.reductions[k].lower.value, pass.reductions[k].upper.value};
  }
  pass.prediction = {alpha_plane_output(reduced, grid), reduced[0].lower, reduced[0].upper};
}

PredictionWithInterval predict(std::span<const double> x, const ConstrainedParams& params,
                               const ModelConfig& config) {
  ForwardPass pass;
  forward(x, params, config, config.alpha_grid(), pass);
  return pass.prediction;
}

std::vector<PredictionWithInterval> predict_batch(const Matrix& x, const ConstrainedParams& params,
                                                  const ModelConfig& config) {
  const auto grid = config.alpha_grid();
  ForwardPass pass;
  std::vector<PredictionWithInterval> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward(x.row(r), params, config, grid, pass);
    out[r] = pass.prediction;
  }
  return out;
}

}  // namespace zgt2
