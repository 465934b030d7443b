#include "zgt2/params.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "zgt2/error.hpp"
#include "zgt2/rng.hpp"

namespace zgt2 {

namespace {

constexpr double kInitSigma = 1.0;
constexpr double kInitSmfScale = 0.1;
constexpr double kInitHeight = 0.9;
constexpr double kInitSigmaRatio = 0.9;

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kZadehGT2: return "Z-GT2";
    case Variant::kMendelJohnGT2: return "MJ-GT2";
    case Variant::kIT2Height: return "IT2-H";
    case Variant::kIT2HeightSigma: return "IT2-HS";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  const auto u = upper(name);
  if (u == "Z-GT2") return Variant::kZadehGT2;
  if (u == "MJ-GT2") return Variant::kMendelJohnGT2;
  if (u == "IT2-H") return Variant::kIT2Height;
  if (u == "IT2-HS") return Variant::kIT2HeightSigma;
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (expected Z-GT2, MJ-GT2, IT2-H or IT2-HS)");
}

void ModelConfig::validate() const {
  if (rules < 1) throw ConfigError("rule count must be >= 1");
  if (inputs < 1) throw ConfigError("input dimension must be >= 1");
  if (plane_param < 0) throw ConfigError("K must be >= 0");
  if (!is_interval_type2() && plane_param < 1) {
    throw ConfigError("general type-2 variants need at least two alpha planes (K >= 1)");
  }
}

AlphaPlaneGrid ModelConfig::alpha_grid() const {
  return is_interval_type2() ? AlphaPlaneGrid::single_plane() : AlphaPlaneGrid::uniform(plane_param);
}

std::size_t ModelConfig::plane_count() const {
  return is_interval_type2() ? 1 : static_cast<std::size_t>(plane_param) + 1;
}

ParamLayout ParamLayout::for_config(const ModelConfig& config) {
  config.validate();
  const auto pm = static_cast<std::size_t>(config.rules) * static_cast<std::size_t>(config.inputs);
  const auto m = static_cast<std::size_t>(config.inputs);
  const auto p = static_cast<std::size_t>(config.rules);
  std::vector<std::pair<std::string, std::size_t>> spec;
  switch (config.variant) {
    case Variant::kZadehGT2:
      spec = {{"c", pm}, {"sigma", pm}, {"sigma_l", m}, {"sigma_r", m}};
      break;
    case Variant::kMendelJohnGT2:
      spec = {{"c", pm}, {"sigma", pm}, {"h", pm}, {"delta1", m}, {"delta2", m}};
      break;
    case Variant::kIT2Height:
      spec = {{"c", pm}, {"sigma", pm}, {"h", pm}};
      break;
    case Variant::kIT2HeightSigma:
      spec = {{"c", pm}, {"sigma", pm}, {"sigma_ratio", pm}, {"h", pm}};
      break;
  }
  spec.emplace_back("a", pm);
  spec.emplace_back("a0", p);

  ParamLayout layout;
  for (auto& [name, size] : spec) {
    layout.groups_.push_back({name, layout.total_, size});
    layout.total_ += size;
  }
  return layout;
}

const ParamGroup* ParamLayout::find(std::string_view name) const {
  for (const auto& g : groups_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

const ParamGroup& ParamLayout::at(std::string_view name) const {
  if (const auto* g = find(name)) return *g;
  throw ConfigError("layout has no parameter group '" + std::string(name) + "'");
}

const std::string& ParamLayout::group_of(std::size_t i) const {
  for (const auto& g : groups_) {
    if (i >= g.offset && i < g.offset + g.size) return g.name;
  }
  throw ShapeError("parameter index outside layout");
}

std::string ParamLayout::describe() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (i) out << ' ';
    out << groups_[i].name << ':' << groups_[i].offset << ':' << groups_[i].size;
  }
  return out.str();
}

std::span<double> RawParams::group(std::string_view name) {
  const auto& g = layout.at(name);
  return std::span(values).subspan(g.offset, g.size);
}

std::span<const double> RawParams::group(std::string_view name) const {
  const auto& g = layout.at(name);
  return std::span(values).subspan(g.offset, g.size);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double logit(double p) { return std::log(p / (1.0 - p)); }

double inverse_softplus(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

std::size_t count_params(Variant variant, int rules, int inputs) {
  const auto p = static_cast<std::size_t>(rules);
  const auto m = static_cast<std::size_t>(inputs);
  const std::size_t consequents = p * (m + 1);
  switch (variant) {
    case Variant::kZadehGT2: return (2 * p + 2) * m + consequents;
    case Variant::kMendelJohnGT2: return (3 * p + 2) * m + consequents;
    case Variant::kIT2Height: return 3 * p * m + consequents;
    case Variant::kIT2HeightSigma: return 4 * p * m + consequents;
  }
  return 0;
}

ConstrainedParams constrain(const RawParams& raw, const ModelConfig& config) {
  if (raw.layout != ParamLayout::for_config(config) || raw.values.size() != raw.layout.total()) {
    throw ShapeError("raw parameter layout does not match the model configuration");
  }
  ConstrainedParams out;
  out.variant = config.variant;
  out.rules = config.rules;
  out.inputs = config.inputs;

  const auto copy = [&](std::string_view name) {
    const auto g = raw.group(name);
    return std::vector<double>(g.begin(), g.end());
  };
  const auto mapped = [&](std::string_view name, double (*f)(double)) {
    auto v = copy(name);
    for (auto& x : v) x = f(x);
    return v;
  };

  out.center = copy("c");
  out.sigma = mapped("sigma", softplus);
  out.a = copy("a");
  out.a0 = copy("a0");

  switch (config.variant) {
    case Variant::kZadehGT2:
      out.smf_left_scale = mapped("sigma_l", sigmoid);
      out.smf_right_scale = mapped("sigma_r", sigmoid);
      break;
    case Variant::kMendelJohnGT2: {
      out.height = mapped("h", sigmoid);
      // delta1 <= delta2 keeps every alpha-plane ordered.
      out.delta1 = mapped("delta1", sigmoid);
      const auto d2 = raw.group("delta2");
      out.delta2.resize(out.delta1.size());
      for (std::size_t m = 0; m < d2.size(); ++m) {
        out.delta2[m] = out.delta1[m] + (1.0 - out.delta1[m]) * sigmoid(d2[m]);
      }
      break;
    }
    case Variant::kIT2Height:
      out.height = mapped("h", sigmoid);
      break;
    case Variant::kIT2HeightSigma: {
      out.height = mapped("h", sigmoid);
      const auto ratio = raw.group("sigma_ratio");
      out.sigma_lower.resize(out.sigma.size());
      for (std::size_t i = 0; i < ratio.size(); ++i) {
        out.sigma_lower[i] = out.sigma[i] * sigmoid(ratio[i]);
      }
      break;
    }
  }
  return out;
}

Matrix kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iterations) {
  const std::size_t n = points.rows();
  const std::size_t dim = points.cols();
  const auto kk = static_cast<std::size_t>(k);
  if (k < 1 || kk > n) throw ConfigError("k-means needs 1 <= k <= number of points");

  const auto dist2 = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim; ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
    return s;
  };

  Rng rng(seed);
  Matrix centers(kk, dim);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  auto first = points.row(rng.below(n));
  std::copy(first.begin(), first.end(), centers.row(0).begin());
  for (std::size_t c = 1; c < kk; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], dist2(points.row(i), centers.row(c - 1)));
      total += nearest[i];
    }
    std::size_t pick = rng.below(n);
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0 && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    auto chosen = points.row(pick);
    std::copy(chosen.begin(), chosen.end(), centers.row(c).begin());
  }

  std::vector<std::size_t> assign(n, kk);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kk; ++c) {
        const double d = dist2(points.row(i), centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums(kk, dim);
    std::vector<std::size_t> counts(kk, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t j = 0; j < dim; ++j) sums(assign[i], j) += points(i, j);
    }
    for (std::size_t c = 0; c < kk; ++c) {
      if (counts[c] == 0) continue;  // keep an emptied centre where it was
      for (std::size_t j = 0; j < dim; ++j) {
        centers(c, j) = sums(c, j) / static_cast<double>(counts[c]);
      }
    }
  }
  return centers;
}

RawParams init_params(const Dataset& dataset, const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  if (dataset.dim() != static_cast<std::size_t>(config.inputs)) {
    throw ShapeError("dataset dimension does not match the model input dimension");
  }
  if (static_cast<std::size_t>(config.rules) > dataset.size()) {
    throw ConfigError("rule count exceeds the number of training samples");
  }
  RawParams raw;
  raw.layout = ParamLayout::for_config(config);
  raw.values.assign(raw.layout.total(), 0.0);

  const Matrix centers = kmeans(dataset.features, config.rules, seed);
  auto c = raw.group("c");
  std::copy(centers.data().begin(), centers.data().end(), c.begin());
  std::ranges::fill(raw.group("sigma"), inverse_softplus(kInitSigma));

  if (config.variant == Variant::kZadehGT2) {
    std::ranges::fill(raw.group("sigma_l"), logit(kInitSmfScale));
    std::ranges::fill(raw.group("sigma_r"), logit(kInitSmfScale));
  } else {
    std::ranges::fill(raw.group("h"), logit(kInitHeight));
  }
  if (config.variant == Variant::kIT2HeightSigma) {
    std::ranges::fill(raw.group("sigma_ratio"), logit(kInitSigmaRatio));
  }
  // MJ delta1/delta2 stay at 0.

  const auto n = static_cast<Eigen::Index>(dataset.size());
  const auto m = static_cast<Eigen::Index>(dataset.dim());
  Eigen::MatrixXd design(n, m + 1);
  Eigen::VectorXd target(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < m; ++j) {
      design(r, j) = dataset.features(static_cast<std::size_t>(r), static_cast<std::size_t>(j));
    }
    design(r, m) = 1.0;
    target(r) = dataset.targets[static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
  auto a = raw.group("a");
  auto a0 = raw.group("a0");
  for (int p = 0; p < config.rules; ++p) {
    for (Eigen::Index j = 0; j < m; ++j) {
      a[static_cast<std::size_t>(p) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] =
          coef(j);
    }
    a0[static_cast<std::size_t>(p)] = coef(m);
  }
  return raw;
}

}  // namespace zgt2
