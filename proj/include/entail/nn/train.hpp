#pragma once
// Mini-batch training (SGD or Adam) for entail::nn::Mlp.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "entail/nn/mlp.hpp"

namespace entail::nn {

enum class Optimizer { SGD, Adam };

struct TrainConfig {
  Optimizer optimizer = Optimizer::Adam;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  bool shuffle = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw Error("learning rate must be > 0");
    if (batch_size == 0) throw Error("batch size must be >= 1");
    if (epochs == 0) throw Error("epochs must be >= 1");
  }
};

class SgdOptimizer {
 public:
  explicit SgdOptimizer(double lr) : lr_(lr) {}

  void step(Mlp& model, const Gradients& g) {
    auto& layers = model.mutable_layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
      layers[k].weights -= lr_ * g.weights[k];
      layers[k].bias -= lr_ * g.bias[k];
    }
  }

 private:
  double lr_;
};

class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& model, const TrainConfig& cfg)
      : lr_(cfg.learning_rate), b1_(cfg.beta1), b2_(cfg.beta2), eps_(cfg.epsilon) {
    for (const auto& l : model.layers()) {
      mw_.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
      vw_.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
      mb_.push_back(Vector::Zero(l.bias.size()));
      vb_.push_back(Vector::Zero(l.bias.size()));
    }
  }

  void step(Mlp& model, const Gradients& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    auto& layers = model.mutable_layers();
    for (std::size_t k = 0; k < layers.size(); ++k) {
      update(layers[k].weights.array(), g.weights[k].array(), mw_[k].array(), vw_[k].array(), c1, c2);
      update(layers[k].bias.array(), g.bias[k].array(), mb_[k].array(), vb_[k].array(), c1, c2);
    }
  }

 private:
  template <typename Param, typename Grad, typename Moment>
  void update(Param&& w, const Grad& g, Moment&& m, Moment&& v, double c1, double c2) const {
    m = b1_ * m + (1.0 - b1_) * g;
    v = b2_ * v + (1.0 - b2_) * g.square();
    w -= lr_ * (m / c1) / ((v / c2).sqrt() + eps_);
  }

  double lr_, b1_, b2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<Matrix> mw_, vw_;
  std::vector<Vector> mb_, vb_;
};

struct FitResult {
  Mlp model;
  std::vector<double> loss_history;  // mean training loss per epoch
};

inline std::uint64_t batch_dropout_seed(std::uint64_t seed, std::size_t epoch, std::size_t batch) {
  using detail::splitmix64;
  return splitmix64(splitmix64(seed) ^ splitmix64((static_cast<std::uint64_t>(epoch) << 32) ^ batch));
}

// Trains a copy of `model` on rows of `x` with class indices `labels`.
// Deterministic in (model, data, config): shuffling and dropout are seeded
// from config.seed.
inline FitResult fit(Mlp model, const Matrix& x, std::span<const std::size_t> labels,
                     const TrainConfig& config) {
  config.validate();
  if (x.rows() == 0) throw Error("cannot fit on an empty dataset");
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw Error("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                std::to_string(labels.size()) + ") differ in count");
  check_input(model, x.cols());
  const Matrix targets = one_hot(labels);

  const std::size_t n = labels.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 shuffle_rng(detail::splitmix64(config.seed ^ 0x5348554646ull));

  SgdOptimizer sgd(config.learning_rate);
  AdamOptimizer adam(model, config);

  FitResult result;
  result.loss_history.reserve(config.epochs);
  Matrix xb, yb;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double weighted_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t len = std::min(config.batch_size, n - start);
      xb.resize(static_cast<Eigen::Index>(len), x.cols());
      yb.resize(static_cast<Eigen::Index>(len), targets.cols());
      for (std::size_t i = 0; i < len; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = x.row(order[start + i]);
        yb.row(static_cast<Eigen::Index>(i)) = targets.row(order[start + i]);
      }
      const Gradients g =
          gradients(model, xb, yb, Mode::train(batch_dropout_seed(config.seed, epoch, batch_index)));
      weighted_loss += g.loss * static_cast<double>(len);
      if (config.optimizer == Optimizer::Adam)
        adam.step(model, g);
      else
        sgd.step(model, g);
    }
    result.loss_history.push_back(weighted_loss / static_cast<double>(n));
  }
  model.validate();
  result.model = std::move(model);
  return result;
}

inline double accuracy(const Mlp& model, const Matrix& x, std::span<const std::size_t> labels) {
  const auto preds = predict(model, x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i].label == labels[i] ? 1 : 0;
  return preds.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(preds.size());
}

}  // namespace entail::nn
