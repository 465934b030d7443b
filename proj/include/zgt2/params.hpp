#pragma once

// Learnable-parameter layout for the four model families, the mapping from
// unconstrained optimiser variables to valid fuzzy-set parameters, and
// initialisation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zgt2/data.hpp"
#include "zgt2/membership.hpp"

namespace zgt2 {

enum class Variant {
  kZadehGT2,  // "Z-GT2"
  kMendelJohnGT2,  // "MJ-GT2"
  kIT2Height,  // "IT2-H": one sigma plus LMF height
  kIT2HeightSigma,  // "IT2-HS": sigma pair plus LMF height
};

std::string_view variant_name(Variant v);
/// Accepts the canonical names above (case-insensitive). Throws ConfigError.
Variant parse_variant(std::string_view name);

/// Structural model configuration.
struct ModelConfig {
  Variant variant = Variant::kZadehGT2;
  int rules = 5;       // P
  int inputs = 1;      // M
  int plane_param = 2;  // K; the model has K+1 alpha planes

  /// Throws ConfigError on P < 1, M < 1, K < 0, or a GT2 variant with K < 1.
  void validate() const;
  bool is_interval_type2() const noexcept {
    return variant == Variant::kIT2Height || variant == Variant::kIT2HeightSigma;
  }
  /// IT2 variants always use a single plane of weight 1.
  AlphaPlaneGrid alpha_grid() const;
  std::size_t plane_count() const;
};

/// Named slice of the flat parameter vector.
struct ParamGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;

  friend bool operator==(const ParamGroup&, const ParamGroup&) = default;
};

/// Offsets of every parameter group for one configuration.
class ParamLayout {
 public:
  static ParamLayout for_config(const ModelConfig& config);

  std::span<const ParamGroup> groups() const noexcept { return groups_; }
  std::size_t total() const noexcept { return total_; }
  /// Returns nullptr if the variant has no such group.
  const ParamGroup* find(std::string_view name) const;
  const ParamGroup& at(std::string_view name) const;
  /// Name of the group that owns flat index `i`.
  const std::string& group_of(std::size_t i) const;
  /// "name:offset:size" entries separated by spaces.
  std::string describe() const;

  friend bool operator==(const ParamLayout&, const ParamLayout&) = default;

 private:
  std::vector<ParamGroup> groups_;
  std::size_t total_ = 0;
};

/// Unconstrained optimiser variables.
struct RawParams {
  ParamLayout layout;
  std::vector<double> values;

  std::span<double> group(std::string_view name);
  std::span<const double> group(std::string_view name) const;
};

/// Parameters in their constrained form. Matrices are P x M row-major.
/// Only the members used by the variant are populated.
struct ConstrainedParams {
  Variant variant = Variant::kZadehGT2;
  int rules = 0;
  int inputs = 0;

  std::vector<double> center;       // P*M
  std::vector<double> sigma;        // P*M; PMF sigma, or the UMF sigma for IT2-HS
  std::vector<double> sigma_lower;  // P*M; IT2-HS only
  std::vector<double> height;       // P*M; MJ-GT2, IT2-H, IT2-HS
  std::vector<double> smf_left_scale;   // M; Z-GT2, sig(raw) in [0,1]
  std::vector<double> smf_right_scale;  // M; Z-GT2
  std::vector<double> delta1;  // M; MJ-GT2
  std::vector<double> delta2;  // M; MJ-GT2
  std::vector<double> a;   // P*M consequent slopes
  std::vector<double> a0;  // P consequent intercepts

  std::size_t index(int p, int m) const noexcept {
    return static_cast<std::size_t>(p) * static_cast<std::size_t>(inputs) +
           static_cast<std::size_t>(m);
  }
};

double sigmoid(double x);
double softplus(double x);
double logit(double p);
double inverse_softplus(double y);

/// (2P+2)M + P(M+1) for Z-GT2, (3P+2)M + P(M+1) for MJ-GT2,
/// 3PM + P(M+1) for IT2-H, 4PM + P(M+1) for IT2-HS.
std::size_t count_params(Variant variant, int rules, int inputs);

/// Maps raw variables to constrained parameters. Total for every input.
/// Z-GT2 SMF deviations stay as sigmoid scales; zadeh_smf_sigmas turns them
/// into absolute deviations for a given PMF grade.
ConstrainedParams constrain(const RawParams& raw, const ModelConfig& config);

/// Seeded initialisation: k-means++ centres, unit PMF sigma, narrow SMFs,
/// least-squares consequents shared by every rule. Throws ConfigError if P > N.
RawParams init_params(const Dataset& dataset, const ModelConfig& config, std::uint64_t seed);

/// k-means++ seeding followed by Lloyd iterations. Returns k x cols centres.
Matrix kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iterations = 100);

}  // namespace zgt2
