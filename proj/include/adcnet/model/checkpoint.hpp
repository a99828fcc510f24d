#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adcnet/embedding.hpp"
#include "adcnet/model/train.hpp"

namespace adcnet::model {

constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct Checkpoint {
  MlpClassifier model;
  TrainConfig config;
  embedding::ComponentSet ablated;
  std::vector<embedding::Slice> layout;
  embedding::DarScaler scaler;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::string model_name;
  std::string trained_at;
  std::map<std::string, double> metrics;

  bool operator==(const Checkpoint& o) const;
};

std::vector<std::uint8_t> serialize(const Checkpoint& c);
/// Throws FormatError (bad magic or malformed section), VersionMismatch
/// (newer format) or CorruptChecksum (truncated or altered payload).
Checkpoint deserialize(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// UTC ISO-8601 time, taken from SOURCE_DATE_EPOCH when set.
std::string current_timestamp();

}  // namespace adcnet::model
