#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "adcnet/model/train.hpp"

namespace adcnet::model {

struct SearchSpace {
  std::vector<std::size_t> hidden_dims{64, 128, 256, 512};
  std::vector<double> learning_rates{1e-4, 3e-4, 1e-3};
  std::vector<std::size_t> batch_sizes{16, 32, 64};
  std::vector<double> l2_penalties{0.0, 1e-5, 1e-4};

  std::size_t size() const;
  /// Mixed-radix decode of `index` on top of `base`.
  TrainConfig config(std::size_t index, const TrainConfig& base) const;
};

struct Trial {
  std::size_t trial = 0;         // order of proposal
  std::size_t config_index = 0;  // position in the search space
  TrainConfig config;
  double val_auc = 0.0;  // mean best validation AUC over seeds
  bool diverged = false;
};

class SearchStrategy {
 public:
  virtual ~SearchStrategy() = default;
  /// Up to `count` config indices not yet tried, given the finished trials.
  virtual std::vector<std::size_t> propose(const SearchSpace& space, const std::vector<Trial>& done,
                                           std::size_t count) = 0;
};

/// Seeded sampling without replacement.
class RandomSearch : public SearchStrategy {
 public:
  explicit RandomSearch(std::uint64_t seed) : seed_(seed) {}
  std::vector<std::size_t> propose(const SearchSpace& space, const std::vector<Trial>& done,
                                   std::size_t count) override;

 private:
  std::uint64_t seed_;
  std::vector<std::size_t> order_;
  std::size_t next_ = 0;
};

struct SearchResult {
  TrainConfig best;
  std::vector<Trial> trials;
  std::size_t best_trial = 0;
};

/// Runs up to n_trials distinct configurations (fewer when the space is
/// smaller), each trained once per seed; the config with the highest mean
/// validation AUC wins, ties going to the earlier trial. `jobs` trials run
/// concurrently.
SearchResult hyperparameter_search(const Dataset& train_set, const Dataset& val_set,
                                   const SearchSpace& space, const TrainConfig& base,
                                   std::size_t n_trials, const std::vector<std::uint64_t>& seeds,
                                   SearchStrategy& strategy, std::size_t jobs = 1);

}  // namespace adcnet::model
