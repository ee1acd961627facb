#include <gtest/gtest.h>

#include "entail/nn/train.hpp"
#include "oracles.hpp"

using namespace entail;
using namespace entail::nn;

namespace {

Mlp small_blob_model(std::uint64_t seed) {
  std::vector<LayerSpec> specs = {{10, 64, Activation::ReLU, 0.0, 0.0}, {64, 3, Activation::Sigmoid, 0.0, 0.0}};
  return init_model(specs, seed);
}

TrainConfig blob_config() {
  TrainConfig c;  // Adam, lr 1e-3, batch 64
  c.epochs = 50;
  c.seed = 2024;
  return c;
}

}  // namespace

TEST(Fit, SeparatesGaussianBlobs) {
  const auto blobs = oracle::gaussian_blobs(300, 10, 4.0, 17);
  const auto result = fit(small_blob_model(3), blobs.x, blobs.labels, blob_config());
  ASSERT_EQ(result.loss_history.size(), 50u);
  EXPECT_GE(accuracy(result.model, blobs.x, blobs.labels), 0.95);
  EXPECT_LT(result.loss_history.back(), result.loss_history.front());
}

TEST(Fit, DeterministicForFixedSeed) {
  const auto blobs = oracle::gaussian_blobs(120, 10, 4.0, 5);
  auto cfg = blob_config();
  cfg.epochs = 5;
  std::vector<LayerSpec> specs = {{10, 16, Activation::ReLU, 0.5, 1e-3}, {16, 3, Activation::Sigmoid, 0.0, 0.0}};
  const auto a = fit(init_model(specs, 1), blobs.x, blobs.labels, cfg);
  const auto b = fit(init_model(specs, 1), blobs.x, blobs.labels, cfg);
  EXPECT_TRUE(a.model == b.model);
  EXPECT_EQ(a.loss_history, b.loss_history);

  cfg.seed += 1;
  const auto c = fit(init_model(specs, 1), blobs.x, blobs.labels, cfg);
  EXPECT_FALSE(a.model == c.model);
}

TEST(Fit, SmallStepDecreasesLoss) {
  for (auto opt : {Optimizer::SGD, Optimizer::Adam}) {
    const auto m = oracle::reduced_model(true, 1e-4, 8);
    auto [x, y] = oracle::random_batch(1, 9, 8);
    std::vector<std::size_t> label = {static_cast<std::size_t>(0)};
    for (std::size_t c = 0; c < 3; ++c)
      if (y(0, static_cast<Eigen::Index>(c)) == 1.0) label[0] = c;
    TrainConfig cfg;
    cfg.optimizer = opt;
    cfg.learning_rate = 1e-4;
    cfg.epochs = 1;
    cfg.batch_size = 1;
    const auto trained = fit(m, x, label, cfg).model;
    EXPECT_LT(loss(trained, x, one_hot(label)), loss(m, x, one_hot(label)));
  }
}

TEST(Fit, SgdAlsoLearns) {
  const auto blobs = oracle::gaussian_blobs(300, 10, 4.0, 17);
  auto cfg = blob_config();
  cfg.optimizer = Optimizer::SGD;
  cfg.learning_rate = 0.5;
  const auto result = fit(small_blob_model(3), blobs.x, blobs.labels, cfg);
  EXPECT_GE(accuracy(result.model, blobs.x, blobs.labels), 0.95);
}

TEST(Fit, RejectsBadInputs) {
  const auto m = small_blob_model(0);
  const std::vector<std::size_t> none;
  EXPECT_THROW(fit(m, Matrix(0, 10), none, TrainConfig{}), Error);
  const std::vector<std::size_t> two = {0, 1};
  EXPECT_THROW(fit(m, Matrix::Zero(2, 9), two, TrainConfig{}), DimensionError);
  EXPECT_THROW(fit(m, Matrix::Zero(3, 10), two, TrainConfig{}), Error);
  const std::vector<std::size_t> bad_class = {0, 3};
  EXPECT_THROW(fit(m, Matrix::Zero(2, 10), bad_class, TrainConfig{}), Error);
  TrainConfig zero_lr;
  zero_lr.learning_rate = 0.0;
  EXPECT_THROW(fit(m, Matrix::Zero(2, 10), two, zero_lr), Error);
  TrainConfig zero_batch;
  zero_batch.batch_size = 0;
  EXPECT_THROW(fit(m, Matrix::Zero(2, 10), two, zero_batch), Error);
}

TEST(Predict, TrainedBlobModelAgreesWithGeneratingLabels) {
  const auto blobs = oracle::gaussian_blobs(300, 10, 4.0, 17);
  const auto result = fit(small_blob_model(3), blobs.x, blobs.labels, blob_config());
  const auto preds = predict(result.model, blobs.x);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) agree += preds[i].label == blobs.labels[i];
  EXPECT_GE(static_cast<double>(agree) / 300.0, 0.95);
  // Pure: repeated prediction is identical.
  const auto again = predict(result.model, blobs.x);
  for (std::size_t i = 0; i < preds.size(); ++i) EXPECT_EQ(preds[i].probabilities, again[i].probabilities);
}
