#include "adcnet/model/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "adcnet/error.hpp"
#include "adcnet/random.hpp"

namespace adcnet::model {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_layers(const DenseLayer& hidden, const DenseLayer& output) {
  if (hidden.bias.size() != hidden.weights.rows() || output.bias.size() != output.weights.rows() ||
      output.weights.rows() != 1 || output.weights.cols() != hidden.weights.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "inconsistent layer shapes");
  }
}

Eigen::MatrixXd glorot(std::size_t out, std::size_t in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  Eigen::MatrixXd w(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in));
  // Row-major draw order keeps the layout independent of Eigen storage.
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng, -limit, limit);
  return w;
}

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.y.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.y.push_back(y[rows[i]]);
  }
  return out;
}

MlpClassifier::MlpClassifier(DenseLayer hidden, DenseLayer output, double leaky_slope)
    : hidden_(std::move(hidden)), output_(std::move(output)), leaky_slope_(leaky_slope) {
  check_layers(hidden_, output_);
}

MlpClassifier MlpClassifier::initialize(std::size_t in_dim, std::size_t hidden_dim, std::uint64_t seed,
                                        double leaky_slope) {
  if (in_dim == 0 || hidden_dim == 0) throw Error(ErrorCode::InvalidArgument, "layer sizes must be positive");
  Rng rng(seed);
  DenseLayer hidden{glorot(hidden_dim, in_dim, rng), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hidden_dim))};
  DenseLayer output{glorot(1, hidden_dim, rng), Eigen::VectorXd::Zero(1)};
  return MlpClassifier(std::move(hidden), std::move(output), leaky_slope);
}

MlpClassifier MlpClassifier::zeros(std::size_t in_dim, std::size_t hidden_dim, double leaky_slope) {
  const auto in = static_cast<Eigen::Index>(in_dim);
  const auto h = static_cast<Eigen::Index>(hidden_dim);
  return MlpClassifier(DenseLayer{Eigen::MatrixXd::Zero(h, in), Eigen::VectorXd::Zero(h)},
                       DenseLayer{Eigen::MatrixXd::Zero(1, h), Eigen::VectorXd::Zero(1)}, leaky_slope);
}

double MlpClassifier::logit(std::span<const double> x) const {
  if (x.size() != in_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "input has dim " + std::to_string(x.size()) +
                                                  ", model expects " + std::to_string(in_dim()));
  }
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd z = hidden_.weights * v + hidden_.bias;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z[i] < 0.0) z[i] *= leaky_slope_;
  return output_.weights.row(0).dot(z) + output_.bias[0];
}

double MlpClassifier::forward(std::span<const double> x) const { return sigmoid(logit(x)); }

Eigen::VectorXd MlpClassifier::predict(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != in_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "input has dim " + std::to_string(x.cols()) +
                                                  ", model expects " + std::to_string(in_dim()));
  }
  Eigen::MatrixXd a = (x * hidden_.weights.transpose()).rowwise() + hidden_.bias.transpose();
  a = a.unaryExpr([s = leaky_slope_](double z) { return z < 0.0 ? s * z : z; });
  Eigen::VectorXd z = a * output_.weights.row(0).transpose();
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i] + output_.bias[0]);
  return z;
}

std::vector<double> MlpClassifier::predict_vector(const Eigen::MatrixXd& x) const {
  const Eigen::VectorXd p = predict(x);
  return std::vector<double>(p.data(), p.data() + p.size());
}

LossAndGradients MlpClassifier::loss_and_gradients(const Eigen::MatrixXd& x, std::span<const int> y,
                                                   double l2_penalty) const {
  if (static_cast<std::size_t>(x.cols()) != in_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "input has dim " + std::to_string(x.cols()) +
                                                  ", model expects " + std::to_string(in_dim()));
  }
  if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "batch and label counts differ");
  }
  const auto n = static_cast<double>(y.size());
  const Eigen::MatrixXd z1 = (x * hidden_.weights.transpose()).rowwise() + hidden_.bias.transpose();
  const Eigen::MatrixXd a1 = z1.unaryExpr([s = leaky_slope_](double z) { return z < 0.0 ? s * z : z; });
  const Eigen::VectorXd z2 = (a1 * output_.weights.row(0).transpose()).array() + output_.bias[0];

  LossAndGradients out;
  Eigen::VectorXd dz2(z2.size());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z2.size(); ++i) {
    const double p = sigmoid(z2[i]);
    const double pc = std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    const int label = y[static_cast<std::size_t>(i)];
    loss -= label == 1 ? std::log(pc) : std::log(1.0 - pc);
    const bool clamped = p <= kProbabilityEpsilon || p >= 1.0 - kProbabilityEpsilon;
    dz2[i] = clamped ? 0.0 : (p - static_cast<double>(label)) / n;
  }
  out.loss = loss / n + l2_penalty * (hidden_.weights.squaredNorm() + output_.weights.squaredNorm());

  Gradients& g = out.grad;
  g.output_weights = dz2.transpose() * a1;
  g.output_bias = Eigen::VectorXd::Constant(1, dz2.sum());
  Eigen::MatrixXd dz1 = dz2 * output_.weights.row(0);
  for (Eigen::Index c = 0; c < dz1.cols(); ++c)
    for (Eigen::Index r = 0; r < dz1.rows(); ++r)
      if (z1(r, c) < 0.0) dz1(r, c) *= leaky_slope_;
  g.hidden_weights = dz1.transpose() * x;
  g.hidden_bias = dz1.colwise().sum().transpose();
  if (l2_penalty != 0.0) {
    g.hidden_weights += 2.0 * l2_penalty * hidden_.weights;
    g.output_weights += 2.0 * l2_penalty * output_.weights;
  }
  return out;
}

std::vector<double> MlpClassifier::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  out.insert(out.end(), hidden_.weights.data(), hidden_.weights.data() + hidden_.weights.size());
  out.insert(out.end(), hidden_.bias.data(), hidden_.bias.data() + hidden_.bias.size());
  out.insert(out.end(), output_.weights.data(), output_.weights.data() + output_.weights.size());
  out.insert(out.end(), output_.bias.data(), output_.bias.data() + output_.bias.size());
  return out;
}

void MlpClassifier::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw Error(ErrorCode::DimensionMismatch, "parameter count differs");
  const double* p = values.data();
  std::copy(p, p + hidden_.weights.size(), hidden_.weights.data());
  p += hidden_.weights.size();
  std::copy(p, p + hidden_.bias.size(), hidden_.bias.data());
  p += hidden_.bias.size();
  std::copy(p, p + output_.weights.size(), output_.weights.data());
  p += output_.weights.size();
  std::copy(p, p + output_.bias.size(), output_.bias.data());
}

std::vector<double> MlpClassifier::flatten(const Gradients& g) {
  std::vector<double> out;
  out.insert(out.end(), g.hidden_weights.data(), g.hidden_weights.data() + g.hidden_weights.size());
  out.insert(out.end(), g.hidden_bias.data(), g.hidden_bias.data() + g.hidden_bias.size());
  out.insert(out.end(), g.output_weights.data(), g.output_weights.data() + g.output_weights.size());
  out.insert(out.end(), g.output_bias.data(), g.output_bias.data() + g.output_bias.size());
  return out;
}

std::size_t MlpClassifier::parameter_count() const {
  return static_cast<std::size_t>(hidden_.weights.size() + hidden_.bias.size() + output_.weights.size() +
                                  output_.bias.size());
}

bool MlpClassifier::finite() const {
  return hidden_.weights.allFinite() && hidden_.bias.allFinite() && output_.weights.allFinite() &&
         output_.bias.allFinite();
}

}  // namespace adcnet::model
