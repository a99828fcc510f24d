#include "adcnet/experiments/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adcnet/error.hpp"
#include "adcnet/parallel.hpp"
#include "adcnet/random.hpp"

namespace adcnet::experiments {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_rows(const model::Dataset& data) {
  if (data.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty training set");
  if (static_cast<std::size_t>(data.x.rows()) != data.size()) {
    throw Error(ErrorCode::LengthMismatch, "feature rows and labels differ");
  }
}

double gini(std::size_t pos, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

struct TreeBuilder {
  const model::Dataset& data;
  const ForestConfig& config;
  Rng rng;
  std::vector<int> features;  // persistent pool for partial Fisher-Yates draws
  std::size_t mtry;
  RandomForest::Tree tree;

  int leaf(const std::vector<std::size_t>& rows) {
    std::size_t pos = 0;
    for (auto r : rows) pos += data.y[r] == 1;
    RandomForest::Node node;
    node.positive = 2 * pos >= rows.size();
    tree.push_back(node);
    return static_cast<int>(tree.size() - 1);
  }

  int build(const std::vector<std::size_t>& rows, std::size_t depth) {
    std::size_t pos = 0;
    for (auto r : rows) pos += data.y[r] == 1;
    if (depth >= config.max_depth || pos == 0 || pos == rows.size() || rows.size() < 2 * config.min_leaf) {
      return leaf(rows);
    }
    const std::size_t n = rows.size();
    double best_impurity = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> column(n);
    for (std::size_t k = 0; k < mtry; ++k) {
      const auto j = k + static_cast<std::size_t>(uniform_index(rng, features.size() - k));
      std::swap(features[k], features[j]);
      const int f = features[k];
      for (std::size_t i = 0; i < n; ++i) column[i] = {data.x(static_cast<Eigen::Index>(rows[i]), f), data.y[rows[i]]};
      std::sort(column.begin(), column.end());
      std::size_t left_pos = 0;
      for (std::size_t i = 1; i < n; ++i) {
        left_pos += column[i - 1].second == 1;
        if (i < config.min_leaf || n - i < config.min_leaf) continue;
        if (!(column[i - 1].first < column[i].first)) continue;
        const double impurity = (static_cast<double>(i) * gini(left_pos, i) +
                                 static_cast<double>(n - i) * gini(pos - left_pos, n - i)) /
                                static_cast<double>(n);
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = f;
          best_threshold = 0.5 * (column[i - 1].first + column[i].first);
        }
      }
    }
    if (best_feature < 0) return leaf(rows);
    std::vector<std::size_t> left_rows, right_rows;
    for (auto r : rows) {
      (data.x(static_cast<Eigen::Index>(r), best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    tree.push_back({best_feature, best_threshold, -1, -1, false});
    const auto self = tree.size() - 1;
    const int l = build(left_rows, depth + 1);
    const int rgt = build(right_rows, depth + 1);
    tree[self].left = l;
    tree[self].right = rgt;
    return static_cast<int>(self);
  }
};

}  // namespace

void LogisticRegression::fit(const model::Dataset& data, const LogisticConfig& config) {
  require_rows(data);
  const auto n = static_cast<double>(data.size());
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) y[static_cast<Eigen::Index>(i)] = data.y[i];
  weights_ = Eigen::VectorXd::Zero(data.x.cols());
  bias_ = 0.0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Eigen::VectorXd z = data.x * weights_;
    Eigen::VectorXd residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) residual[i] = sigmoid(z[i] + bias_) - y[i];
    const Eigen::VectorXd grad_w = data.x.transpose() * residual / n + 2.0 * config.l2_penalty * weights_;
    const double grad_b = residual.sum() / n;
    weights_ -= config.learning_rate * grad_w;
    bias_ -= config.learning_rate * grad_b;
  }
}

std::vector<double> LogisticRegression::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights_.size()) throw Error(ErrorCode::DimensionMismatch, "feature width does not match the model");
  const Eigen::VectorXd z = x * weights_;
  std::vector<double> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) out[static_cast<std::size_t>(i)] = sigmoid(z[i] + bias_);
  return out;
}

void RandomForest::fit(const model::Dataset& data, const ForestConfig& config) {
  require_rows(data);
  if (config.trees == 0 || config.min_leaf == 0) {
    throw Error(ErrorCode::InvalidArgument, "forest needs at least one tree and min_leaf >= 1");
  }
  const std::size_t d = data.dim();
  const std::size_t mtry = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  trees_.assign(config.trees, {});
  parallel_for(config.trees, config.jobs, [&](std::size_t t) {
    TreeBuilder b{data, config, Rng(derive_seed(config.seed, t)), {}, std::min(mtry, d), {}};
    b.features.resize(d);
    for (std::size_t f = 0; f < d; ++f) b.features[f] = static_cast<int>(f);
    std::vector<std::size_t> rows(data.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i] = config.bootstrap ? static_cast<std::size_t>(uniform_index(b.rng, data.size())) : i;
    }
    b.build(rows, 0);
    trees_[t] = std::move(b.tree);
  });
}

std::vector<double> RandomForest::predict(const Eigen::MatrixXd& x) const {
  if (trees_.empty()) throw Error(ErrorCode::InvalidArgument, "forest is not fitted");
  std::vector<double> out(static_cast<std::size_t>(x.rows()), 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::size_t votes = 0;
    for (const auto& tree : trees_) {
      int node = 0;
      while (tree[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree[static_cast<std::size_t>(node)];
        if (nd.feature >= x.cols()) throw Error(ErrorCode::DimensionMismatch, "feature width does not match the forest");
        node = x(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
      }
      votes += tree[static_cast<std::size_t>(node)].positive;
    }
    out[static_cast<std::size_t>(i)] = static_cast<double>(votes) / static_cast<double>(trees_.size());
  }
  return out;
}

}  // namespace adcnet::experiments
