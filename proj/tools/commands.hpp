#pragma once

// Subcommands of the zgt2 command-line tool. Each returns the process exit
// code and writes human-readable output to `out`, diagnostics to `err`.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zgt2/grad.hpp"
#include "zgt2/params.hpp"

namespace zgt2::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kDataError = 2,
  kDiverged = 3,
  kGradCheckFailed = 4,
};

struct TrainArgs {
  std::filesystem::path config;
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  std::optional<std::string> target_column;
};

struct EvalArgs {
  std::filesystem::path model;
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> out_dir;
  /// "both" (train and test partitions), "train", "test" or "all".
  std::string split = "both";
};

struct GradCheckArgs {
  std::optional<std::filesystem::path> config;
  std::uint64_t seed = 7;
  int instances = 25;  // per variant
  /// Test hook: perturbs one analytic gradient coordinate.
  bool inject_fault = false;
};

struct CampaignArgs {
  std::filesystem::path config;
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  int seeds = 20;
  int workers = 1;
  std::optional<std::string> target_column;
};

inline constexpr double kGradCheckTolerance = 1e-4;

struct GradCheckVariant {
  Variant variant{};
  int instances = 0;
  std::size_t checked = 0;
  std::size_t excluded = 0;
  GradientCheck worst;
  int worst_instance = 0;
};

struct GradCheckSummary {
  std::uint64_t seed = 0;
  double max_relative_error = 0.0;
  std::vector<GradCheckVariant> variants;
};

/// Seeded random instances (M in 1..3, twelve samples, perturbed initial
/// parameters) for each of the four variants, using `base` for P and K.
GradCheckSummary run_gradcheck(const ModelConfig& base, const Quantiles& quantiles,
                               std::uint64_t seed, int instances, bool inject_fault = false);

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradCheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_campaign(const CampaignArgs& args, std::ostream& out, std::ostream& err);

struct SynthArgs {
  std::size_t rows = 500;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

/// Writes the heteroscedastic sine benchmark as CSV (columns x,y).
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);

/// Worker count from ZGT2_WORKERS, or 1.
int default_workers();

}  // namespace zgt2::cli
