#pragma once

// Shared helpers for building random seeded test instances.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "zgt2/data.hpp"
#include "zgt2/params.hpp"
#include "zgt2/rng.hpp"

namespace fixtures {

inline zgt2::ModelConfig model(zgt2::Variant v, int rules, int inputs, int k = 2) {
  zgt2::ModelConfig c;
  c.variant = v;
  c.rules = rules;
  c.inputs = inputs;
  c.plane_param = k;
  return c;
}

/// Raw parameters with every entry ~ N(0, scale).
inline zgt2::RawParams random_raw(const zgt2::ModelConfig& cfg, zgt2::Rng& rng, double scale = 1.0) {
  zgt2::RawParams raw;
  raw.layout = zgt2::ParamLayout::for_config(cfg);
  raw.values.resize(raw.layout.total());
  for (auto& v : raw.values) v = scale * rng.normal();
  return raw;
}

/// n x m standard-normal features with a smooth noisy target.
inline zgt2::Dataset random_dataset(std::size_t n, std::size_t m, zgt2::Rng& rng) {
  zgt2::Dataset d;
  d.features = zgt2::Matrix(n, m);
  d.targets.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      d.features(r, c) = rng.normal();
      s += d.features(r, c);
    }
    d.targets[r] = std::sin(s) + 0.2 * rng.normal();
  }
  return d;
}

inline const std::vector<zgt2::Variant>& all_variants() {
  static const std::vector<zgt2::Variant> v{zgt2::Variant::kZadehGT2, zgt2::Variant::kMendelJohnGT2,
                                            zgt2::Variant::kIT2Height,
                                            zgt2::Variant::kIT2HeightSigma};
  return v;
}

}  // namespace fixtures
