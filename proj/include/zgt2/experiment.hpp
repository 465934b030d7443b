#pragma once

// Multi-seed experiment campaigns: split, normalise, initialise, train and
// evaluate once per seed, then aggregate.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zgt2/config.hpp"
#include "zgt2/data.hpp"
#include "zgt2/inference.hpp"
#include "zgt2/metrics.hpp"

namespace zgt2 {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct TestMetrics {
  double rmse = 0.0;
  double picp = 0.0;
  double pinaw = 0.0;
};

/// Metrics of a trained model on a normalised dataset.
TestMetrics evaluate_model(const RawParams& raw, const ModelConfig& config, const Dataset& data);

struct SeedRecord {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;
  TestMetrics metrics;
  int epochs = 0;
  int best_epoch = 0;
  double wall_time = 0.0;  // seconds; kept out of the deterministic report files
};

struct ExperimentReport {
  std::string dataset_name;
  RunConfig config;
  int inputs = 0;
  std::vector<SeedRecord> records;  // sorted by seed
  std::optional<Summary> rmse, picp, pinaw;  // empty when every seed failed
  std::vector<std::uint64_t> failed_seeds;
};

/// Trains and evaluates seed `seed`: split stream, init/shuffle streams and
/// evaluation on the held-out partition.
SeedRecord run_seed(const Table& table, const RunConfig& config, std::uint64_t seed);

/// Sorts records by seed and recomputes aggregates.
ExperimentReport aggregate(std::string dataset_name, const RunConfig& config, int inputs,
                           std::vector<SeedRecord> records);

struct CampaignOptions {
  int workers = 1;
  /// When set, each finished seed is written here and matching files are
  /// reused on the next run.
  std::optional<std::filesystem::path> checkpoint_dir;
  /// Called after each seed (from worker threads, serialised).
  std::function<void(const SeedRecord&, bool resumed)> on_seed;
};

/// Seeds 1..n_seeds. Runs are independent; results do not depend on worker count.
ExperimentReport run_campaign(const Table& table, std::string dataset_name,
                              const RunConfig& config, int n_seeds,
                              const CampaignOptions& options = {});
ExperimentReport run_campaign(const std::filesystem::path& dataset_path, const RunConfig& config,
                              int n_seeds, const CampaignOptions& options = {});

/// "<dataset>_<variant>_<n>seeds"
std::string report_basename(const ExperimentReport& report);
/// Per-seed rows; raw metrics plus the x100 scaling used in published tables.
void write_report_csv(const ExperimentReport& report, std::ostream& out);
nlohmann::json report_summary_json(const ExperimentReport& report);
/// Writes <base>.csv, <base>_summary.json and <base>_timing.csv; returns their paths.
std::vector<std::filesystem::path> write_report_files(const ExperimentReport& report,
                                                      const std::filesystem::path& dir);

}  // namespace zgt2
