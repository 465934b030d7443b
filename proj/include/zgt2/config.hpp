#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "zgt2/params.hpp"
#include "zgt2/training.hpp"

namespace zgt2 {

/// Everything needed to reproduce one training run. The model input
/// dimension is not part of the file; it comes from the dataset.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::string target_column = "last";
  double train_ratio = 0.7;
};

/// INI-style text:
///
///   [model]  variant, rules, alpha_planes
///   [train]  epochs, batch_size, learning_rate, beta1, beta2, epsilon,
///            tau_lower, tau_upper, seed, clip_norm
///   [data]   target_column, train_ratio
///
/// Every key is optional; unknown sections or keys are errors (ConfigError).
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text form; parse_run_config(format_run_config(c)) == c.
std::string format_run_config(const RunConfig& config);

}  // namespace zgt2
