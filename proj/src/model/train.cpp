#include "adcnet/model/train.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "adcnet/error.hpp"
#include "adcnet/metrics.hpp"
#include "adcnet/random.hpp"

namespace adcnet::model {
namespace {

struct AdamState {
  Gradients m;
  Gradients v;
  std::uint64_t t = 0;
};

Gradients zeros_like(const MlpClassifier& model) {
  return {Eigen::MatrixXd::Zero(model.hidden().weights.rows(), model.hidden().weights.cols()),
          Eigen::VectorXd::Zero(model.hidden().bias.size()),
          Eigen::MatrixXd::Zero(model.output().weights.rows(), model.output().weights.cols()),
          Eigen::VectorXd::Zero(model.output().bias.size())};
}

template <typename Param, typename Grad>
void adam_update(Param& param, const Grad& grad, Param& m, Param& v, double lr, double c1, double c2) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  m = kBeta1 * m + (1.0 - kBeta1) * grad;
  v = kBeta2 * v + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
}

void adam_step(MlpClassifier& model, const Gradients& g, AdamState& s, double lr) {
  ++s.t;
  const double c1 = 1.0 - std::pow(0.9, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(0.999, static_cast<double>(s.t));
  adam_update(model.hidden().weights, g.hidden_weights, s.m.hidden_weights, s.v.hidden_weights, lr, c1, c2);
  adam_update(model.hidden().bias, g.hidden_bias, s.m.hidden_bias, s.v.hidden_bias, lr, c1, c2);
  adam_update(model.output().weights, g.output_weights, s.m.output_weights, s.v.output_weights, lr, c1, c2);
  adam_update(model.output().bias, g.output_bias, s.m.output_bias, s.v.output_bias, lr, c1, c2);
}

// Content-defined row order: by a hash of (label, row bits), ties broken by
// the row values themselves.
std::vector<std::size_t> canonical_order(const Dataset& d) {
  const auto n = d.size();
  std::vector<std::uint64_t> hashes(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(d.y[i]));
    for (Eigen::Index c = 0; c < d.x.cols(); ++c) {
      h = splitmix64(h ^ std::bit_cast<std::uint64_t>(d.x(static_cast<Eigen::Index>(i), c)));
    }
    hashes[i] = h;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
    if (d.y[a] != d.y[b]) return d.y[a] < d.y[b];
    for (Eigen::Index c = 0; c < d.x.cols(); ++c) {
      const double va = d.x(static_cast<Eigen::Index>(a), c);
      const double vb = d.x(static_cast<Eigen::Index>(b), c);
      if (va != vb) return va < vb;
    }
    return false;
  });
  return order;
}

}  // namespace

void TrainConfig::validate() const {
  if (max_epochs == 0) throw Error(ErrorCode::InvalidArgument, "max_epochs must be positive");
  if (patience == 0 || patience > max_epochs) {
    throw Error(ErrorCode::InvalidArgument, "patience must be in [1, max_epochs]");
  }
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch_size must be at least 1");
  if (hidden_dim == 0) throw Error(ErrorCode::InvalidArgument, "hidden_dim must be at least 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be positive");
  if (!(l2_penalty >= 0.0)) throw Error(ErrorCode::InvalidArgument, "l2_penalty must be non-negative");
}

std::string TrainConfig::describe() const {
  std::ostringstream out;
  out << "hidden=" << hidden_dim << " lr=" << learning_rate << " batch=" << batch_size << " l2=" << l2_penalty
      << " max_epochs=" << max_epochs << " patience=" << patience << " seed=" << seed;
  return out.str();
}

TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& config) {
  config.validate();
  return train(train_set, val_set, config,
               MlpClassifier::initialize(train_set.dim(), config.hidden_dim, derive_seed(config.seed, 0),
                                         config.leaky_slope));
}

TrainResult train(const Dataset& train_set, const Dataset& val_set, const TrainConfig& config,
                  MlpClassifier initial) {
  config.validate();
  if (train_set.size() == 0 || val_set.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, "training and validation sets must be non-empty");
  }
  if (train_set.dim() != initial.in_dim() || val_set.dim() != initial.in_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "feature width does not match the model");
  }
  const bool has_pos = std::count(val_set.y.begin(), val_set.y.end(), 1) > 0;
  const bool has_neg = std::count(val_set.y.begin(), val_set.y.end(), 0) > 0;
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::SingleClassValidation, "validation set needs both classes for AUC monitoring");
  }

  const auto order = canonical_order(train_set);
  const Dataset data = train_set.subset(order);
  const std::size_t n = data.size();

  TrainResult result;
  result.model = initial;
  MlpClassifier model = std::move(initial);
  AdamState adam{zeros_like(model), zeros_like(model)};
  Rng rng(derive_seed(config.seed, 1));
  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  Eigen::MatrixXd batch_x;
  std::vector<int> batch_y;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto perm = permutation(n, rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      batch_x.resize(static_cast<Eigen::Index>(end - start), data.x.cols());
      batch_y.resize(end - start);
      for (std::size_t k = start; k < end; ++k) {
        batch_x.row(static_cast<Eigen::Index>(k - start)) = data.x.row(static_cast<Eigen::Index>(perm[k]));
        batch_y[k - start] = data.y[perm[k]];
      }
      const auto lg = model.loss_and_gradients(batch_x, batch_y, config.l2_penalty);
      loss_sum += lg.loss * static_cast<double>(end - start);
      adam_step(model, lg.grad, adam, config.learning_rate);
    }
    if (!model.finite() || !std::isfinite(loss_sum)) {
      result.diverged = true;
      break;
    }
    const auto scores = model.predict_vector(val_set.x);
    const double auc = metrics::roc_auc(scores, val_set.y);
    EpochRecord record{epoch, loss_sum / static_cast<double>(n), auc, auc > best};
    result.history.push_back(record);
    if (record.improved) {
      best = auc;
      since_best = 0;
      result.model = model;
      result.best_epoch = epoch;
      result.best_val_auc = auc;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace adcnet::model
