#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "adcnet/model/mlp.hpp"

namespace adcnet::experiments {

struct LogisticConfig {
  double learning_rate = 1e-2;
  std::size_t epochs = 500;
  double l2_penalty = 1e-4;
};

/// Logistic regression fitted by full-batch gradient descent on mean BCE
/// plus l2 * |w|^2, starting from zero weights.
class LogisticRegression {
 public:
  void fit(const model::Dataset& data, const LogisticConfig& config = {});
  std::vector<double> predict(const Eigen::MatrixXd& x) const;
  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
};

struct ForestConfig {
  std::size_t trees = 200;
  std::size_t max_depth = 16;
  std::size_t min_leaf = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

/// Bagged CART trees split on Gini impurity with sqrt(d) candidate features
/// per node. The score is the fraction of trees whose leaf votes positive.
class RandomForest {
 public:
  struct Node {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    bool positive = false;
  };
  using Tree = std::vector<Node>;

  void fit(const model::Dataset& data, const ForestConfig& config = {});
  std::vector<double> predict(const Eigen::MatrixXd& x) const;
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
};

}  // namespace adcnet::experiments
