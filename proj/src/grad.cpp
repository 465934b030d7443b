#include "zgt2/grad.hpp"

#include <algorithm>
#include <cmath>

#include "zgt2/error.hpp"
#include "zgt2/inference.hpp"

namespace zgt2 {

void Quantiles::validate() const {
  if (!(lower > 0.0 && lower < upper && upper < 1.0)) {
    throw ConfigError("quantiles must satisfy 0 < lower < upper < 1");
  }
}

double log_cosh(double eps) {
  const double a = std::abs(eps);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double pinball(double residual, double tau) {
  return std::max(tau * residual, (tau - 1.0) * residual);
}

double pinball_slope(double residual, double tau) { return residual >= 0.0 ? tau : tau - 1.0; }

namespace {

// Loss gradient in constrained coordinates, accumulated over a batch.
struct ConstrainedGrad {
  std::vector<double> center, sigma, sigma_lower, height;
  std::vector<double> smf_left, smf_right, delta1, delta2;
  std::vector<double> a, a0;

  explicit ConstrainedGrad(const ModelConfig& c) {
    const auto pm = static_cast<std::size_t>(c.rules) * static_cast<std::size_t>(c.inputs);
    const auto m = static_cast<std::size_t>(c.inputs);
    center.assign(pm, 0.0);
    sigma.assign(pm, 0.0);
    sigma_lower.assign(pm, 0.0);
    height.assign(pm, 0.0);
    smf_left.assign(m, 0.0);
    smf_right.assign(m, 0.0);
    delta1.assign(m, 0.0);
    delta2.assign(m, 0.0);
    a.assign(pm, 0.0);
    a0.assign(static_cast<std::size_t>(c.rules), 0.0);
  }
};

struct SampleLoss {
  double accuracy = 0.0;
  double pinball = 0.0;
};

SampleLoss sample_loss(const PredictionWithInterval& pred, double target,
                       const LossOptions& options) {
  SampleLoss s;
  s.accuracy = log_cosh(target - pred.point);
  if (options.interval_terms) {
    s.pinball = pinball(target - pred.lower, options.quantiles.lower) +
                pinball(target - pred.upper, options.quantiles.upper);
  }
  return s;
}

// Backward pass of one sample; `weight` is the sample's share of the mean.
void backward_sample(std::span<const double> x, double target, const ConstrainedParams& params,
                     const ModelConfig& config, const AlphaPlaneGrid& grid,
                     const ForwardPass& pass, const LossOptions& options, double weight,
                     ConstrainedGrad& g) {
  const auto P = static_cast<std::size_t>(config.rules);
  const auto M = static_cast<std::size_t>(config.inputs);
  const std::size_t PM = P * M;
  const std::size_t planes = grid.size();
  const auto& pred = pass.prediction;

  // d loss / d point output and d loss / d alpha_0 interval bounds.
  const double d_point = -std::tanh(target - pred.point) * weight;
  std::vector<double> d_lower(planes), d_upper(planes);
  for (std::size_t k = 0; k < planes; ++k) {
    d_lower[k] = d_upper[k] = d_point * grid[k] * 0.5 / grid.weight_sum();
  }
  if (options.interval_terms) {
    d_lower[0] -= pinball_slope(target - pred.lower, options.quantiles.lower) * weight;
    d_upper[0] -= pinball_slope(target - pred.upper, options.quantiles.upper) * weight;
  }

  // Type reduction -> consequents and firing endpoints.
  std::vector<double> d_y(P, 0.0);
  std::vector<double> d_fire_lo(planes * P, 0.0), d_fire_hi(planes * P, 0.0);
  for (std::size_t k = 0; k < planes; ++k) {
    const auto& red = pass.reductions[k];
    const auto* f = &pass.firings[k * P];
    const auto side = [&](const KmSide& s, double grad) {
      if (red.degenerate) {
        for (std::size_t p = 0; p < P; ++p) d_y[p] += grad / static_cast<double>(P);
        return;
      }
      for (std::size_t p = 0; p < P; ++p) {
        const double w = s.uses_upper[p] ? f[p].upper : f[p].lower;
        d_y[p] += grad * w / s.denominator;
        const double dw = grad * (pass.consequents[p] - s.value) / s.denominator;
        (s.uses_upper[p] ? d_fire_hi : d_fire_lo)[k * P + p] += dw;
      }
    };
    side(red.lower, d_lower[k]);
    side(red.upper, d_upper[k]);
  }

  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t m = 0; m < M; ++m) g.a[p * M + m] += d_y[p] * x[m];
    g.a0[p] += d_y[p];
  }

  // Product t-norm -> per-dimension membership bounds.
  std::vector<MembershipBounds> d_bounds(planes * PM);
  std::vector<double> prefix(M + 1), suffix(M + 1);
  for (std::size_t k = 0; k < planes; ++k) {
    for (std::size_t p = 0; p < P; ++p) {
      const auto* b = &pass.bounds[k * PM + p * M];
      for (int which = 0; which < 2; ++which) {
        const double df = which == 0 ? d_fire_lo[k * P + p] : d_fire_hi[k * P + p];
        if (df == 0.0) continue;
        prefix[0] = 1.0;
        for (std::size_t m = 0; m < M; ++m) {
          prefix[m + 1] = prefix[m] * (which == 0 ? b[m].lower : b[m].upper);
        }
        suffix[M] = 1.0;
        for (std::size_t m = M; m-- > 0;) {
          suffix[m] = suffix[m + 1] * (which == 0 ? b[m].lower : b[m].upper);
        }
        for (std::size_t m = 0; m < M; ++m) {
          auto& db = d_bounds[k * PM + p * M + m];
          (which == 0 ? db.lower : db.upper) += df * prefix[m] * suffix[m + 1];
        }
      }
    }
  }

  // Alpha-plane bounds -> PMF grades and SMF/shape parameters.
  std::vector<double> d_gauss(PM, 0.0), d_gauss_lower(PM, 0.0);
  switch (config.variant) {
    case Variant::kZadehGT2:
      for (std::size_t k = 0; k < planes; ++k) {
        const double w = k == 0 ? 1.0 : alpha_cut_radius(grid[k]) / kAlphaFloorRadius;
        for (std::size_t i = 0; i < PM; ++i) {
          const std::size_t m = i % M;
          const auto& db = d_bounds[k * PM + i];
          const double gm = pass.gauss[i];
          const double sl = params.smf_left_scale[m];
          const double sr = params.smf_right_scale[m];
          d_gauss[i] += db.lower * (1.0 - sl * w) + db.upper * (1.0 - sr * w);
          g.smf_left[m] -= db.lower * gm * w;
          g.smf_right[m] += db.upper * (1.0 - gm) * w;
        }
      }
      break;
    case Variant::kMendelJohnGT2:
      for (std::size_t k = 0; k < planes; ++k) {
        const double alpha = k == 0 ? 0.0 : grid[k];
        for (std::size_t i = 0; i < PM; ++i) {
          const std::size_t m = i % M;
          const auto& db = d_bounds[k * PM + i];
          const double umf0 = pass.gauss[i];
          const double h = params.height[i];
          const double spread = umf0 - h * umf0;
          const double d1 = params.delta1[m];
          const double d2 = params.delta2[m];
          const double d_lmf0 = db.lower * (1.0 - alpha * d1) + db.upper * alpha * (1.0 - d2);
          const double d_umf0 = db.lower * alpha * d1 + db.upper * (1.0 - alpha * (1.0 - d2));
          g.delta1[m] += db.lower * alpha * spread;
          g.delta2[m] += db.upper * alpha * spread;
          g.height[i] += d_lmf0 * umf0;
          d_gauss[i] += d_lmf0 * h + d_umf0;
        }
      }
      break;
    case Variant::kIT2Height:
      for (std::size_t i = 0; i < PM; ++i) {
        const auto& db = d_bounds[i];
        g.height[i] += db.lower * pass.gauss[i];
        d_gauss[i] += db.lower * params.height[i] + db.upper;
      }
      break;
    case Variant::kIT2HeightSigma:
      for (std::size_t i = 0; i < PM; ++i) {
        const auto& db = d_bounds[i];
        g.height[i] += db.lower * pass.gauss_lower[i];
        d_gauss_lower[i] += db.lower * params.height[i];
        d_gauss[i] += db.upper;
      }
      break;
  }

  // Gaussian PMFs -> centres and deviations.
  const double md = static_cast<double>(M);
  for (std::size_t i = 0; i < PM; ++i) {
    const double d = x[i % M] - params.center[i];
    if (d_gauss[i] != 0.0) {
      const double s = params.sigma[i];
      const double t = d_gauss[i] * pass.gauss[i] / (md * s * s);
      g.center[i] += t * d;
      g.sigma[i] += t * d * d / s;
    }
    if (d_gauss_lower[i] != 0.0) {
      const double s = params.sigma_lower[i];
      const double t = d_gauss_lower[i] * pass.gauss_lower[i] / (md * s * s);
      g.center[i] += t * d;
      g.sigma_lower[i] += t * d * d / s;
    }
  }
}

// Chain rule through the constraint mappings.
void to_raw(const RawParams& raw, const ConstrainedParams& params, const ModelConfig& config,
            const ConstrainedGrad& g, std::vector<double>& out) {
  out.assign(raw.values.size(), 0.0);
  const auto put = [&](std::string_view name, auto&& fn) {
    const auto& grp = raw.layout.at(name);
    for (std::size_t i = 0; i < grp.size; ++i) out[grp.offset + i] = fn(i, raw.values[grp.offset + i]);
  };
  put("c", [&](std::size_t i, double) { return g.center[i]; });
  put("a", [&](std::size_t i, double) { return g.a[i]; });
  put("a0", [&](std::size_t i, double) { return g.a0[i]; });

  if (config.variant == Variant::kIT2HeightSigma) {
    put("sigma", [&](std::size_t i, double v) {
      const double ratio = params.sigma_lower[i] / params.sigma[i];
      return (g.sigma[i] + g.sigma_lower[i] * ratio) * sigmoid(v);
    });
    put("sigma_ratio", [&](std::size_t i, double v) {
      const double r = sigmoid(v);
      return g.sigma_lower[i] * params.sigma[i] * r * (1.0 - r);
    });
  } else {
    put("sigma", [&](std::size_t i, double v) { return g.sigma[i] * sigmoid(v); });
  }

  const auto logistic_chain = [&](const std::vector<double>& grad) {
    return [&grad](std::size_t i, double v) {
      const double s = sigmoid(v);
      return grad[i] * s * (1.0 - s);
    };
  };
  switch (config.variant) {
    case Variant::kZadehGT2:
      put("sigma_l", logistic_chain(g.smf_left));
      put("sigma_r", logistic_chain(g.smf_right));
      break;
    case Variant::kMendelJohnGT2: {
      put("h", logistic_chain(g.height));
      const auto b2 = raw.group("delta2");
      put("delta1", [&](std::size_t m, double v) {
        const double d1 = sigmoid(v);
        const double s2 = sigmoid(b2[m]);
        return (g.delta1[m] + g.delta2[m] * (1.0 - s2)) * d1 * (1.0 - d1);
      });
      put("delta2", [&](std::size_t m, double v) {
        const double s2 = sigmoid(v);
        return g.delta2[m] * (1.0 - params.delta1[m]) * s2 * (1.0 - s2);
      });
      break;
    }
    case Variant::kIT2Height:
    case Variant::kIT2HeightSigma:
      put("h", logistic_chain(g.height));
      break;
  }
}

std::string offending_group(const RawParams& raw, std::span<const double> gradient) {
  // A non-finite parameter is the cause; a non-finite gradient is a symptom.
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    if (!std::isfinite(raw.values[i])) return raw.layout.group_of(i);
  }
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    if (!std::isfinite(gradient[i])) return raw.layout.group_of(i);
  }
  std::size_t worst = 0;
  for (std::size_t i = 1; i < raw.values.size(); ++i) {
    if (std::abs(raw.values[i]) > std::abs(raw.values[worst])) worst = i;
  }
  return raw.values.empty() ? std::string("?") : raw.layout.group_of(worst);
}

}  // namespace

LossBreakdown evaluate_loss(const RawParams& raw, const BatchView& batch, const ModelConfig& config,
                            const LossOptions& options) {
  if (batch.size() == 0) throw ShapeError("loss needs a non-empty batch");
  const auto params = constrain(raw, config);
  const auto grid = config.alpha_grid();
  ForwardPass pass;
  double acc = 0.0;
  double pin = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = batch.row(i);
    forward(batch.features.row(r), params, config, grid, pass);
    const auto s = sample_loss(pass.prediction, batch.targets[r], options);
    acc += s.accuracy;
    pin += s.pinball;
  }
  const double n = static_cast<double>(batch.size());
  return {acc / n + pin / n, acc / n, pin / n};
}

LossBreakdown loss_and_grad(const RawParams& raw, const BatchView& batch, const ModelConfig& config,
                            const LossOptions& options, std::vector<double>& gradient) {
  if (batch.size() == 0) throw ShapeError("loss needs a non-empty batch");
  if (options.interval_terms) options.quantiles.validate();
  const auto params = constrain(raw, config);
  const auto grid = config.alpha_grid();
  ConstrainedGrad cg(config);
  ForwardPass pass;
  double acc = 0.0;
  double pin = 0.0;
  const double weight = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = batch.row(i);
    const auto x = batch.features.row(r);
    forward(x, params, config, grid, pass);
    const auto s = sample_loss(pass.prediction, batch.targets[r], options);
    acc += s.accuracy;
    pin += s.pinball;
    backward_sample(x, batch.targets[r], params, config, grid, pass, options, weight, cg);
  }
  to_raw(raw, params, config, cg, gradient);

  const double n = static_cast<double>(batch.size());
  const LossBreakdown loss{acc / n + pin / n, acc / n, pin / n};
  bool finite = std::isfinite(loss.total);
  for (double v : gradient) finite = finite && std::isfinite(v);
  if (!finite) {
    const auto group = offending_group(raw, gradient);
    throw DivergenceError("non-finite loss or gradient (parameter group '" + group + "')", group);
  }
  return loss;
}

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> theta, double step) {
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be positive");
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + step;
    const double up = f(probe);
    probe[i] = theta[i] - step;
    const double down = f(probe);
    probe[i] = theta[i];
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

std::vector<double> finite_diff_grad(const RawParams& raw, const BatchView& batch,
                                     const ModelConfig& config, const LossOptions& options,
                                     double step) {
  RawParams probe = raw;
  return finite_diff_grad(
      [&](std::span<const double> theta) {
        std::copy(theta.begin(), theta.end(), probe.values.begin());
        return evaluate_loss(probe, batch, config, options).total;
      },
      raw.values, step);
}

std::vector<std::uint8_t> branch_signature(const RawParams& raw, const BatchView& batch,
                                           const ModelConfig& config, const LossOptions& options) {
  const auto params = constrain(raw, config);
  const auto grid = config.alpha_grid();
  ForwardPass pass;
  std::vector<std::uint8_t> sig;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = batch.row(i);
    forward(batch.features.row(r), params, config, grid, pass);
    for (const auto& red : pass.reductions) {
      sig.push_back(red.degenerate);
      sig.insert(sig.end(), red.lower.uses_upper.begin(), red.lower.uses_upper.end());
      sig.insert(sig.end(), red.upper.uses_upper.begin(), red.upper.uses_upper.end());
    }
    if (options.interval_terms) {
      sig.push_back(batch.targets[r] - pass.prediction.lower >= 0.0);
      sig.push_back(batch.targets[r] - pass.prediction.upper >= 0.0);
    }
  }
  return sig;
}

GradientCheck check_gradient(const RawParams& raw, const BatchView& batch,
                             const ModelConfig& config, const LossOptions& options,
                             std::span<const double> analytic, double step, double kink_radius) {
  if (analytic.size() != raw.values.size()) throw ShapeError("gradient length mismatch");
  const auto numeric = finite_diff_grad(raw, batch, config, options, step);
  const auto base = branch_signature(raw, batch, config, options);
  RawParams probe = raw;
  GradientCheck out;
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    bool kink = false;
    for (double offset : {-kink_radius, -step, step, kink_radius}) {
      probe.values[i] = raw.values[i] + offset;
      kink = kink || branch_signature(probe, batch, config, options) != base;
    }
    probe.values[i] = raw.values[i];
    if (kink) {
      ++out.excluded;
      continue;
    }
    ++out.checked;
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), kGradCheckFloor});
    const double rel = std::abs(analytic[i] - numeric[i]) / scale;
    if (rel >= out.max_relative_error) {
      out.max_relative_error = rel;
      out.worst_index = i;
      out.worst_group = raw.layout.group_of(i);
      out.worst_analytic = analytic[i];
      out.worst_numeric = numeric[i];
    }
  }
  return out;
}

}  // namespace zgt2
