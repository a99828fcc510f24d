#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adcnet/model/mlp.hpp"

namespace adcnet::model {

struct TrainConfig {
  std::size_t max_epochs = 200;
  std::size_t patience = 30;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t hidden_dim = 256;
  std::uint64_t seed = 0;
  double l2_penalty = 0.0;
  double leaky_slope = kDefaultLeakySlope;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
  std::string describe() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_auc = 0.0;
  bool improved = false;
  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  MlpClassifier model;  // snapshot at the best validation AUC
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 0 when no epoch completed
  double best_val_auc = 0.0;
  bool diverged = false;
};

/// Adam on mini-batches, validation AUC after every epoch, early stopping
/// after `patience` epochs without strict improvement. The training set is
/// put in a content-defined order before the seeded per-epoch shuffles, so
/// the input row order does not affect the result. Throws
/// SingleClassValidation when the validation labels are one class.
TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& config);
TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& config,
                  MlpClassifier initial);

}  // namespace adcnet::model
