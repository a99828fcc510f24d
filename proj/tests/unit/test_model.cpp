#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>

#include "adcnet/error.hpp"
#include "adcnet/model/checkpoint.hpp"
#include "adcnet/model/hpo.hpp"
#include "adcnet/model/mlp.hpp"
#include "adcnet/model/train.hpp"
#include "adcnet/random.hpp"

using namespace adcnet;
using namespace adcnet::model;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

// Two Gaussian blobs separated along a random direction.
Dataset blobs(std::size_t n, std::size_t dim, std::uint64_t seed, double separation = 2.0) {
  Rng rng(seed);
  Dataset d;
  d.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    d.y.push_back(label);
    for (std::size_t j = 0; j < dim; ++j) {
      const double shift = j < 3 ? (label ? separation : -separation) : 0.0;
      d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = normal01(rng) + shift;
    }
  }
  return d;
}

TrainConfig small_config() {
  TrainConfig c;
  c.hidden_dim = 8;
  c.batch_size = 16;
  c.learning_rate = 1e-2;
  c.max_epochs = 60;
  c.patience = 10;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Mlp, ZeroModelPredictsHalf) {
  const auto m = MlpClassifier::zeros(5, 3);
  const std::vector<double> x{1, -2, 3, 0.5, 7};
  EXPECT_DOUBLE_EQ(m.forward(x), 0.5);
  const std::vector<double> wrong{1, 2};
  EXPECT_EQ(code_of([&] { m.forward(wrong); }), ErrorCode::DimensionMismatch);
}

TEST(Mlp, OutputBiasIsMonotone) {
  auto m = MlpClassifier::initialize(6, 4, 11);
  const std::vector<double> x{0.3, -1, 2, 0.1, 0.5, -0.7};
  double previous = 0.0;
  for (double b = -30; b <= 30; b += 0.5) {
    m.output().bias[0] = b;
    const double y = m.forward(x);
    EXPECT_GE(y, previous);
    previous = y;
  }
  EXPECT_GT(previous, 0.999);
}

TEST(Mlp, SeededInitIsDeterministic) {
  EXPECT_EQ(MlpClassifier::initialize(10, 4, 5), MlpClassifier::initialize(10, 4, 5));
  EXPECT_FALSE(MlpClassifier::initialize(10, 4, 5) == MlpClassifier::initialize(10, 4, 6));
}

TEST(Mlp, PredictMatchesForward) {
  const auto m = MlpClassifier::initialize(7, 5, 2);
  const auto d = blobs(9, 7, 4);
  const auto p = m.predict(d.x);
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    std::vector<double> row(7);
    for (Eigen::Index j = 0; j < 7; ++j) row[static_cast<std::size_t>(j)] = d.x(i, j);
    EXPECT_NEAR(p[i], m.forward(row), 1e-12);
  }
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t in = 2 + uniform_index(rng, 10);
    const std::size_t h = 1 + uniform_index(rng, 6);
    auto m = MlpClassifier::initialize(in, h, 1000 + static_cast<std::uint64_t>(trial));
    const auto d = blobs(6, in, 50 + static_cast<std::uint64_t>(trial), 0.5);
    const double l2 = trial % 2 ? 1e-3 : 0.0;
    const auto analytic = MlpClassifier::flatten(m.loss_and_gradients(d.x, d.y, l2).grad);
    auto params = m.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
      const double saved = params[k];
      params[k] = saved + 1e-5;
      m.set_parameters(params);
      const double up = m.loss_and_gradients(d.x, d.y, l2).loss;
      params[k] = saved - 1e-5;
      m.set_parameters(params);
      const double down = m.loss_and_gradients(d.x, d.y, l2).loss;
      params[k] = saved;
      m.set_parameters(params);
      const double numeric = (up - down) / 2e-5;
      const double scale = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-6});
      EXPECT_LT(std::abs(numeric - analytic[k]) / scale, 1e-4) << "trial " << trial << " param " << k;
    }
  }
}

TEST(Mlp, DuplicatedBatchGivesSameLossAndGradients) {
  const auto m = MlpClassifier::initialize(4, 3, 8);
  const auto d = blobs(5, 4, 1);
  Dataset twice;
  twice.x.resize(10, 4);
  twice.x << d.x, d.x;
  twice.y = d.y;
  twice.y.insert(twice.y.end(), d.y.begin(), d.y.end());
  const auto a = m.loss_and_gradients(d.x, d.y, 1e-4);
  const auto b = m.loss_and_gradients(twice.x, twice.y, 1e-4);
  EXPECT_NEAR(a.loss, b.loss, 1e-12);
  const auto ga = MlpClassifier::flatten(a.grad);
  const auto gb = MlpClassifier::flatten(b.grad);
  for (std::size_t i = 0; i < ga.size(); ++i) EXPECT_NEAR(ga[i], gb[i], 1e-12);
}

TEST(Mlp, ConfidentCorrectPredictionsHaveTinyLoss) {
  auto m = MlpClassifier::zeros(2, 2);
  m.output().bias[0] = 40.0;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  const std::vector<int> y{1, 1, 1};
  EXPECT_LE(m.loss_and_gradients(x, y, 0.0).loss, -std::log(1.0 - kProbabilityEpsilon) + 1e-15);
}

TEST(Train, ConstantModelStopsAtEpoch31) {
  const auto train_set = blobs(40, 5, 1);
  const auto val_set = blobs(20, 5, 2);
  TrainConfig c = small_config();
  c.max_epochs = 200;
  c.patience = 30;
  const auto r = train(train_set, val_set, c, MlpClassifier::zeros(5, 4));
  EXPECT_EQ(r.history.size(), 31u);
  EXPECT_EQ(r.best_epoch, 1u);
  EXPECT_DOUBLE_EQ(r.best_val_auc, 0.5);
}

TEST(Train, SeparableDataReachesHighAuc) {
  const auto train_set = blobs(160, 12, 10);
  const auto val_set = blobs(40, 12, 11);
  const auto r = train(train_set, val_set, small_config());
  EXPECT_GE(r.best_val_auc, 0.95);
  for (const auto& e : r.history) EXPECT_LE(e.val_auc, r.best_val_auc);
}

TEST(Train, DeterministicAndOrderIndependent) {
  const auto train_set = blobs(60, 6, 20, 0.7);
  const auto val_set = blobs(30, 6, 21, 0.7);
  const auto a = train(train_set, val_set, small_config());
  const auto b = train(train_set, val_set, small_config());
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.model, b.model);
  std::vector<std::size_t> reversed(train_set.size());
  for (std::size_t i = 0; i < reversed.size(); ++i) reversed[i] = reversed.size() - 1 - i;
  const auto c = train(train_set.subset(reversed), val_set, small_config());
  EXPECT_EQ(a.history, c.history);
  EXPECT_EQ(a.model, c.model);
}

TEST(Train, SingleClassValidationRejected) {
  const auto train_set = blobs(20, 3, 1);
  auto val_set = blobs(6, 3, 2);
  std::fill(val_set.y.begin(), val_set.y.end(), 1);
  EXPECT_EQ(code_of([&] { train(train_set, val_set, small_config()); }), ErrorCode::SingleClassValidation);
}

TEST(Train, ConfigValidation) {
  TrainConfig c = small_config();
  c.patience = c.max_epochs + 1;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c = small_config();
  c.batch_size = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
}

TEST(Hpo, SingleConfigSpace) {
  const auto train_set = blobs(40, 4, 1);
  const auto val_set = blobs(20, 4, 2);
  SearchSpace space{{4}, {1e-2}, {16}, {0.0}};
  RandomSearch strategy(1);
  const auto r = hyperparameter_search(train_set, val_set, space, small_config(), 30, {1}, strategy);
  EXPECT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.best.hidden_dim, 4u);
}

TEST(Hpo, DivergentConfigLoses) {
  const auto train_set = blobs(40, 4, 1);
  const auto val_set = blobs(20, 4, 2);
  SearchSpace space{{4}, {1e300, 1e-2}, {16}, {0.0}};
  RandomSearch strategy(3);
  const auto r = hyperparameter_search(train_set, val_set, space, small_config(), 30, {1}, strategy, 2);
  ASSERT_EQ(r.trials.size(), 2u);
  EXPECT_DOUBLE_EQ(r.best.learning_rate, 1e-2);
}

TEST(Hpo, SameSeedSameTrialSequence) {
  SearchSpace space;
  RandomSearch a(42);
  RandomSearch b(42);
  EXPECT_EQ(a.propose(space, {}, 30), b.propose(space, {}, 30));
  RandomSearch c(42);
  auto first = c.propose(space, {}, 10);
  const auto rest = c.propose(space, {}, 20);
  first.insert(first.end(), rest.begin(), rest.end());
  EXPECT_EQ(first, RandomSearch(42).propose(space, {}, 30));
  EXPECT_EQ(space.size(), 108u);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Checkpoint c;
  c.model = MlpClassifier::initialize(9, 4, 77);
  c.config = small_config();
  c.layout = {{embedding::Component::Linker, 0, 9}};
  c.scaler = {1.5, 0.25, 2.0, 1.0, 8.0};
  c.history = {{1, 0.69, 0.5, true}, {2, 0.5, 0.75, true}};
  c.best_epoch = 2;
  c.model_name = "unit";
  c.trained_at = "2024-01-01T00:00:00Z";
  c.metrics = {{"AUC", 0.123456789012345}};
  const std::string path = ::testing::TempDir() + "/m.adcn";
  save_checkpoint(c, path);
  const auto loaded = load_checkpoint(path);
  EXPECT_TRUE(loaded == c);
  EXPECT_EQ(serialize(loaded), serialize(c));
}

TEST(Checkpoint, CorruptionIsDetected) {
  Checkpoint c;
  c.model = MlpClassifier::initialize(3, 2, 1);
  auto bytes = serialize(c);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 5);
  EXPECT_EQ(code_of([&] { deserialize(truncated); }), ErrorCode::CorruptChecksum);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  EXPECT_EQ(code_of([&] { deserialize(flipped); }), ErrorCode::CorruptChecksum);
  auto future = bytes;
  future[4] = 2;
  EXPECT_EQ(code_of([&] { deserialize(future); }), ErrorCode::VersionMismatch);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { deserialize(magic); }), ErrorCode::FormatError);
  EXPECT_EQ(code_of([] { load_checkpoint("/nonexistent/dir/x.adcn"); }), ErrorCode::IoError);
}

TEST(Checkpoint, TimestampHonorsSourceDateEpoch) {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  EXPECT_EQ(current_timestamp(), "1970-01-01T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
}
