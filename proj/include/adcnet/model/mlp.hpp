#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace adcnet::model {

constexpr double kDefaultLeakySlope = 0.01;
constexpr double kProbabilityEpsilon = 1e-7;

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out

  std::size_t in_dim() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights.rows()); }
  bool operator==(const DenseLayer& o) const { return weights == o.weights && bias == o.bias; }
};

/// Samples are rows.
struct Dataset {
  Eigen::MatrixXd x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct Gradients {
  Eigen::MatrixXd hidden_weights;
  Eigen::VectorXd hidden_bias;
  Eigen::MatrixXd output_weights;
  Eigen::VectorXd output_bias;
};

struct LossAndGradients {
  double loss = 0.0;
  Gradients grad;
};

class MlpClassifier {
 public:
  MlpClassifier() = default;
  MlpClassifier(DenseLayer hidden, DenseLayer output, double leaky_slope = kDefaultLeakySlope);

  /// Glorot-uniform weights, zero biases, seeded.
  static MlpClassifier initialize(std::size_t in_dim, std::size_t hidden_dim, std::uint64_t seed,
                                  double leaky_slope = kDefaultLeakySlope);
  static MlpClassifier zeros(std::size_t in_dim, std::size_t hidden_dim,
                             double leaky_slope = kDefaultLeakySlope);

  std::size_t in_dim() const { return hidden_.in_dim(); }
  std::size_t hidden_dim() const { return hidden_.out_dim(); }
  double leaky_slope() const { return leaky_slope_; }
  const DenseLayer& hidden() const { return hidden_; }
  const DenseLayer& output() const { return output_; }
  DenseLayer& hidden() { return hidden_; }
  DenseLayer& output() { return output_; }

  /// Probability for one fused feature vector. Throws DimensionMismatch.
  double forward(std::span<const double> x) const;
  double logit(std::span<const double> x) const;
  /// Probabilities for every row.
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
  std::vector<double> predict_vector(const Eigen::MatrixXd& x) const;

  /// Mean clamped binary cross-entropy plus l2 * (sum of squared weights),
  /// with gradients by backpropagation.
  LossAndGradients loss_and_gradients(const Eigen::MatrixXd& x, std::span<const int> y,
                                      double l2_penalty) const;

  /// Flattened parameters: hidden weights (column-major), hidden bias,
  /// output weights, output bias.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);
  static std::vector<double> flatten(const Gradients& g);
  std::size_t parameter_count() const;
  bool finite() const;

  bool operator==(const MlpClassifier& o) const {
    return hidden_ == o.hidden_ && output_ == o.output_ && leaky_slope_ == o.leaky_slope_;
  }

 private:
  DenseLayer hidden_;
  DenseLayer output_;
  double leaky_slope_ = kDefaultLeakySlope;
};

}  // namespace adcnet::model
