#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zgt2/matrix.hpp"

namespace zgt2 {

/// Raw numeric table as read from disk.
struct Table {
  std::vector<std::string> feature_names;
  std::string target_name;
  Matrix features;
  std::vector<double> targets;

  std::size_t size() const noexcept { return targets.size(); }
};

/// Reads a comma- or semicolon-delimited CSV with a header line. The
/// delimiter is detected from the header. `target_column` is a column name
/// or "last".
Table load_csv(const std::filesystem::path& path, std::string_view target_column = "last");

/// Parses CSV text; `origin` names the source in error messages.
Table parse_csv(std::string_view text, std::string_view target_column = "last",
                std::string_view origin = "<memory>");

Table select_rows(const Table& table, std::span<const std::size_t> rows);

/// Seeded uniform shuffle; the first ceil(ratio * N) rows go to train.
std::pair<Table, Table> split(const Table& table, double ratio, std::uint64_t seed);
std::size_t train_split_size(std::size_t n, double ratio);

struct ColumnStats {
  double mean = 0.0;
  double std = 1.0;  // population convention (denominator N)
};

/// Z-score statistics fitted on a training table, applied by column name.
struct Normalizer {
  std::vector<std::string> feature_names;
  std::vector<ColumnStats> feature_stats;
  std::string target_name;
  ColumnStats target_stats;

  double normalize_target(double y) const { return (y - target_stats.mean) / target_stats.std; }
  double denormalize_target(double z) const { return z * target_stats.std + target_stats.mean; }
};

/// Normalised data ready for training or evaluation.
struct Dataset {
  Matrix features;
  std::vector<double> targets;
  Normalizer normalizer;
  /// Columns dropped because they were constant on the training partition.
  std::vector<std::string> dropped_columns;

  std::size_t size() const noexcept { return targets.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
};

/// Fits statistics on `train`. Zero-variance columns are dropped and listed in
/// `dropped`. Throws DataError when no usable column remains.
Normalizer fit_normalizer(const Table& train, std::vector<std::string>* dropped = nullptr);

/// Applies stored statistics; columns are matched by name.
Dataset apply_normalizer(const Normalizer& normalizer, const Table& table);

/// Statistics from train only, applied to both partitions.
std::pair<Dataset, Dataset> zscore_fit_apply(const Table& train, const Table& test);

}  // namespace zgt2
