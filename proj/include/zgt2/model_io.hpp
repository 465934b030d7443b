#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "zgt2/data.hpp"
#include "zgt2/error.hpp"
#include "zgt2/params.hpp"

namespace zgt2 {

/// Malformed, corrupted or inconsistent model file.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

/// Everything needed to evaluate a trained model on raw data.
struct SavedModel {
  ModelConfig config;
  RawParams params;
  Normalizer normalizer;
  std::string target_column = "last";
  double train_ratio = 0.7;
  std::uint64_t split_seed = 0;
};

/// Text header (format tag, config, layout, column names, payload length and
/// checksum) followed by a little-endian float64 payload: raw parameters,
/// feature means, feature deviations, target mean, target deviation.
void save_model(const std::filesystem::path& path, const SavedModel& model);
std::string serialize_model(const SavedModel& model);

/// Rejects unknown versions, checksum failures and layout/config mismatches
/// with ModelFormatError.
SavedModel load_model(const std::filesystem::path& path);
SavedModel deserialize_model(std::string_view bytes);

}  // namespace zgt2
