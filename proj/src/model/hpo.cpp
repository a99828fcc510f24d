#include "adcnet/model/hpo.hpp"

#include <algorithm>

#include "adcnet/error.hpp"
#include "adcnet/parallel.hpp"
#include "adcnet/random.hpp"

namespace adcnet::model {

std::size_t SearchSpace::size() const {
  return hidden_dims.size() * learning_rates.size() * batch_sizes.size() * l2_penalties.size();
}

TrainConfig SearchSpace::config(std::size_t index, const TrainConfig& base) const {
  if (index >= size()) throw Error(ErrorCode::InvalidArgument, "search-space index out of range");
  TrainConfig c = base;
  c.l2_penalty = l2_penalties[index % l2_penalties.size()];
  index /= l2_penalties.size();
  c.batch_size = batch_sizes[index % batch_sizes.size()];
  index /= batch_sizes.size();
  c.learning_rate = learning_rates[index % learning_rates.size()];
  index /= learning_rates.size();
  c.hidden_dim = hidden_dims[index];
  return c;
}

std::vector<std::size_t> RandomSearch::propose(const SearchSpace& space, const std::vector<Trial>&,
                                               std::size_t count) {
  if (order_.size() != space.size()) {
    Rng rng(seed_);
    order_ = permutation(space.size(), rng);
    next_ = 0;
  }
  std::vector<std::size_t> out;
  while (out.size() < count && next_ < order_.size()) out.push_back(order_[next_++]);
  return out;
}

SearchResult hyperparameter_search(const Dataset& train_set, const Dataset& val_set,
                                   const SearchSpace& space, const TrainConfig& base, std::size_t n_trials,
                                   const std::vector<std::uint64_t>& seeds, SearchStrategy& strategy,
                                   std::size_t jobs) {
  if (space.size() == 0) throw Error(ErrorCode::InvalidArgument, "search space is empty");
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed is required");
  SearchResult result;
  const std::size_t target = std::min(n_trials, space.size());
  jobs = std::max<std::size_t>(1, jobs);
  while (result.trials.size() < target) {
    const auto proposals = strategy.propose(space, result.trials, std::min(jobs, target - result.trials.size()));
    if (proposals.empty()) break;
    std::vector<Trial> batch(proposals.size());
    parallel_for(proposals.size(), jobs, [&](std::size_t i) {
      Trial& t = batch[i];
      t.trial = result.trials.size() + i;
      t.config_index = proposals[i];
      t.config = space.config(proposals[i], base);
      double sum = 0.0;
      for (std::uint64_t seed : seeds) {
        TrainConfig c = t.config;
        c.seed = seed;
        const TrainResult r = train(train_set, val_set, c);
        t.diverged = t.diverged || r.diverged;
        sum += r.best_epoch > 0 ? r.best_val_auc : 0.0;
      }
      t.val_auc = sum / static_cast<double>(seeds.size());
    });
    result.trials.insert(result.trials.end(), batch.begin(), batch.end());
  }
  if (result.trials.empty()) throw Error(ErrorCode::InvalidArgument, "search strategy proposed no configurations");
  for (std::size_t i = 1; i < result.trials.size(); ++i) {
    if (result.trials[i].val_auc > result.trials[result.best_trial].val_auc) result.best_trial = i;
  }
  result.best = result.trials[result.best_trial].config;
  result.best.seed = base.seed;
  return result;
}

}  // namespace adcnet::model
