#pragma once
// Dense feed-forward classifier with three sigmoid outputs followed by a
// softmax, inverted dropout and L2 activity regularization.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "entail/error.hpp"

namespace entail::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr std::size_t kOutputs = 3;
inline constexpr double kLogFloor = 1e-12;

enum class Activation : std::uint8_t { ReLU = 0, Sigmoid = 1 };

inline const char* to_string(Activation a) noexcept {
  return a == Activation::ReLU ? "relu" : "sigmoid";
}

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::ReLU;
  double dropout_rate = 0.0;
  double activity_reg = 0.0;  // L2 coefficient on post-activation outputs

  void validate() const {
    if (in_dim == 0 || out_dim == 0) throw Error("layer dims must be positive");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      throw Error("dropout rate must lie in [0, 1), got " + std::to_string(dropout_rate));
    if (!(std::isfinite(activity_reg) && activity_reg >= 0.0))
      throw Error("activity regularization coefficient must be finite and >= 0");
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Layer {
  LayerSpec spec;
  Matrix weights;  // in_dim x out_dim, row = input index
  Vector bias;     // out_dim
};

class Mlp {
 public:
  Mlp() = default;

  explicit Mlp(std::vector<Layer> layers, std::uint64_t seed = 0)
      : layers_(std::move(layers)), seed_(seed) {
    validate();
  }

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::vector<Layer>& mutable_layers() noexcept { return layers_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::size_t input_dim() const noexcept { return layers_.front().spec.in_dim; }
  std::size_t num_layers() const noexcept { return layers_.size(); }

  std::size_t num_parameters() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  void validate() const {
    if (layers_.empty()) throw Error("model has no layers");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const auto& l = layers_[k];
      l.spec.validate();
      if (static_cast<std::size_t>(l.weights.rows()) != l.spec.in_dim ||
          static_cast<std::size_t>(l.weights.cols()) != l.spec.out_dim ||
          static_cast<std::size_t>(l.bias.size()) != l.spec.out_dim)
        throw Error("layer " + std::to_string(k) + " parameter shape disagrees with its spec");
      if (k + 1 < layers_.size() && l.spec.out_dim != layers_[k + 1].spec.in_dim)
        throw DimensionError("layer " + std::to_string(k + 1) + " input does not chain",
                             l.spec.out_dim, layers_[k + 1].spec.in_dim);
      if (!l.weights.allFinite() || !l.bias.allFinite())
        throw Error("layer " + std::to_string(k) + " has non-finite parameters");
    }
    const auto& last = layers_.back().spec;
    if (last.out_dim != kOutputs || last.activation != Activation::Sigmoid)
      throw Error("final layer must have 3 sigmoid outputs");
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    if (a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t k = 0; k < a.layers_.size(); ++k) {
      const auto& x = a.layers_[k];
      const auto& y = b.layers_[k];
      if (!(x.spec == y.spec) || x.weights != y.weights || x.bias != y.bias) return false;
    }
    return true;
  }

 private:
  std::vector<Layer> layers_;
  std::uint64_t seed_ = 0;
};

// ---------------------------------------------------------------------------
// Architectures

enum class Preset { ImageEntail, TextEntail };

struct PresetOptions {
  double activity_reg = 1e-4;               // applied to every TextEntail hidden layer
  std::vector<double> dropout_overrides{};  // per hidden layer; empty keeps the defaults
};

inline std::size_t preset_input_dim(Preset p) noexcept {
  return p == Preset::ImageEntail ? 4097 : 769;
}

inline std::vector<LayerSpec> expand(Preset preset, const PresetOptions& opts = {}) {
  std::vector<LayerSpec> specs;
  if (preset == Preset::ImageEntail) {
    specs = {{4097, 5000, Activation::ReLU, 0.5, 0.0},
             {5000, kOutputs, Activation::Sigmoid, 0.0, 0.0}};
  } else {
    specs = {{769, 450, Activation::ReLU, 0.55, opts.activity_reg},
             {450, 450, Activation::ReLU, 0.4, opts.activity_reg},
             {450, kOutputs, Activation::Sigmoid, 0.0, 0.0}};
  }
  if (!opts.dropout_overrides.empty()) {
    if (opts.dropout_overrides.size() != specs.size() - 1)
      throw Error("expected " + std::to_string(specs.size() - 1) +
                  " dropout override(s), got " + std::to_string(opts.dropout_overrides.size()));
    for (std::size_t k = 0; k + 1 < specs.size(); ++k) specs[k].dropout_rate = opts.dropout_overrides[k];
  }
  for (const auto& s : specs) s.validate();
  return specs;
}

// Glorot-uniform weights, zero biases.
inline Mlp init_model(std::span<const LayerSpec> specs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  layers.reserve(specs.size());
  for (const auto& s : specs) {
    s.validate();
    const double limit = std::sqrt(6.0 / static_cast<double>(s.in_dim + s.out_dim));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Layer l{s, Matrix(s.in_dim, s.out_dim), Vector::Zero(static_cast<Eigen::Index>(s.out_dim))};
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = dist(rng);
    layers.push_back(std::move(l));
  }
  return Mlp(std::move(layers), seed);
}

inline Mlp init_model(Preset preset, std::uint64_t seed, const PresetOptions& opts = {}) {
  const auto specs = expand(preset, opts);
  return init_model(specs, seed);
}

// ---------------------------------------------------------------------------
// Forward / loss / backward

// Infer applies no dropout. Train draws inverted-dropout masks from `seed`.
struct Mode {
  std::optional<std::uint64_t> dropout_seed;

  static Mode infer() { return {}; }
  static Mode train(std::uint64_t seed) { return {seed}; }
  bool training() const noexcept { return dropout_seed.has_value(); }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double sigmoid(double z) noexcept {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Keep-mask already scaled by 1/(1-rate); one independent stream per layer.
inline Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::uint64_t seed,
                           std::size_t layer) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(layer + 1)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep = 1.0 - rate;
  const double scale = 1.0 / keep;
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = u(rng) < keep ? scale : 0.0;
  return m;
}

inline void row_softmax(const Matrix& s, Matrix& p) {
  p.resize(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) sum += (p(r, c) = std::exp(s(r, c) - mx));
    p.row(r) /= sum;
  }
}

}  // namespace detail

// Everything the backward pass needs from a forward pass over a batch.
struct ForwardTrace {
  std::vector<Matrix> activations;  // post-activation, pre-dropout (batch x out)
  std::vector<Matrix> masks;        // empty matrix when the layer had no dropout
  Matrix probabilities;             // softmax of final sigmoid outputs (batch x 3)
};

inline void check_input(const Mlp& model, Eigen::Index cols) {
  if (static_cast<std::size_t>(cols) != model.input_dim())
    throw DimensionError("model input", model.input_dim(), static_cast<std::size_t>(cols));
}

inline ForwardTrace forward_trace(const Mlp& model, const Matrix& x, Mode mode) {
  check_input(model, x.cols());
  ForwardTrace t;
  const auto& layers = model.layers();
  t.activations.reserve(layers.size());
  t.masks.reserve(layers.size());
  const Matrix* input = &x;
  Matrix dropped;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    Matrix z = *input * l.weights;
    z.rowwise() += l.bias.transpose();
    if (l.spec.activation == Activation::ReLU)
      z = z.cwiseMax(0.0);
    else
      z = z.unaryExpr([](double v) { return detail::sigmoid(v); });
    t.activations.push_back(std::move(z));

    Matrix mask;
    if (mode.training() && l.spec.dropout_rate > 0.0)
      mask = detail::dropout_mask(t.activations.back().rows(), t.activations.back().cols(),
                                  l.spec.dropout_rate, *mode.dropout_seed, k);
    if (mask.size() > 0) {
      dropped = t.activations.back().cwiseProduct(mask);
      input = &dropped;
    } else {
      input = &t.activations.back();
    }
    t.masks.push_back(std::move(mask));
  }
  detail::row_softmax(*input, t.probabilities);
  return t;
}

// Class probabilities for each row of `x`.
inline Matrix forward(const Mlp& model, const Matrix& x, Mode mode = Mode::infer()) {
  return forward_trace(model, x, mode).probabilities;
}

inline std::array<double, kOutputs> forward(const Mlp& model, std::span<const double> x,
                                            Mode mode = Mode::infer()) {
  const Matrix row = Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const Matrix p = forward(model, row, mode);
  return {p(0, 0), p(0, 1), p(0, 2)};
}

inline Matrix one_hot(std::span<const std::size_t> labels) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), kOutputs);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kOutputs) throw Error("class index " + std::to_string(labels[i]) + " out of range");
    y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(labels[i])) = 1.0;
  }
  return y;
}

inline double loss_from_trace(const Mlp& model, const ForwardTrace& t, const Matrix& targets) {
  const auto batch = static_cast<double>(targets.rows());
  double ce = 0.0;
  for (Eigen::Index r = 0; r < targets.rows(); ++r)
    for (Eigen::Index c = 0; c < targets.cols(); ++c)
      if (targets(r, c) != 0.0) ce -= targets(r, c) * std::log(std::max(t.probabilities(r, c), kLogFloor));
  double total = ce / batch;
  for (std::size_t k = 0; k < model.num_layers(); ++k) {
    const double coeff = model.layers()[k].spec.activity_reg;
    if (coeff > 0.0) total += coeff * t.activations[k].squaredNorm() / batch;
  }
  return total;
}

inline void check_batch(const Mlp& model, const Matrix& x, const Matrix& targets) {
  if (x.rows() == 0) throw Error("empty batch");
  if (targets.rows() != x.rows() || targets.cols() != static_cast<Eigen::Index>(kOutputs))
    throw Error("targets must be a batch x 3 matrix matching the inputs");
  check_input(model, x.cols());
}

// Mean cross-entropy of softmax(sigmoid outputs) plus activity penalties.
inline double loss(const Mlp& model, const Matrix& x, const Matrix& targets,
                   Mode mode = Mode::infer()) {
  check_batch(model, x, targets);
  return loss_from_trace(model, forward_trace(model, x, mode), targets);
}

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> bias;
  double loss = 0.0;  // loss at the point where the gradients were taken
};

// Exact gradients of loss() under the given mode (dropout masks held fixed).
inline Gradients gradients(const Mlp& model, const Matrix& x, const Matrix& targets,
                           Mode mode = Mode::infer()) {
  check_batch(model, x, targets);
  const auto& layers = model.layers();
  const std::size_t n = layers.size();
  const ForwardTrace t = forward_trace(model, x, mode);
  const double inv_batch = 1.0 / static_cast<double>(x.rows());

  Gradients g;
  g.loss = loss_from_trace(model, t, targets);
  g.weights.resize(n);
  g.bias.resize(n);

  // dL/d(final sigmoid output) for softmax + CE is (p - y) / B; the log clamp
  // never binds because softmax over values in (0,1) stays above 1 / (1 + 2e).
  Matrix grad_out = (t.probabilities - targets) * inv_batch;
  for (std::size_t k = n; k-- > 0;) {
    const auto& l = layers[k];
    const Matrix& a = t.activations[k];
    // grad_out is with respect to this layer's post-dropout output.
    Matrix grad_a = t.masks[k].size() > 0 ? Matrix(grad_out.cwiseProduct(t.masks[k])) : grad_out;
    if (l.spec.activity_reg > 0.0) grad_a += (2.0 * l.spec.activity_reg * inv_batch) * a;

    Matrix grad_z;
    if (l.spec.activation == Activation::ReLU)
      grad_z = grad_a.cwiseProduct((a.array() > 0.0).cast<double>().matrix());
    else
      grad_z = grad_a.cwiseProduct(a.cwiseProduct((1.0 - a.array()).matrix()));

    const Matrix dropped_prev =
        k == 0 ? Matrix()
               : (t.masks[k - 1].size() > 0 ? Matrix(t.activations[k - 1].cwiseProduct(t.masks[k - 1]))
                                            : t.activations[k - 1]);
    const Matrix& input = k == 0 ? x : dropped_prev;
    g.weights[k].noalias() = input.transpose() * grad_z;
    g.bias[k] = grad_z.colwise().sum().transpose();
    if (k > 0) grad_out.noalias() = grad_z * l.weights.transpose();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Prediction

struct Prediction {
  std::size_t label = 0;
  std::array<double, kOutputs> probabilities{};
};

// First maximum wins, so ties resolve toward the lowest class index.
inline std::size_t argmax(std::span<const double> p) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

inline Prediction predict(const Mlp& model, std::span<const double> x) {
  Prediction out;
  out.probabilities = forward(model, x);
  out.label = argmax(out.probabilities);
  return out;
}

// Batched inference over the rows of `x`, `chunk` rows at a time.
inline std::vector<Prediction> predict(const Mlp& model, const Matrix& x, Eigen::Index chunk = 256) {
  check_input(model, x.cols());
  std::vector<Prediction> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index start = 0; start < x.rows(); start += chunk) {
    const Eigen::Index len = std::min(chunk, x.rows() - start);
    const Matrix p = forward(model, Matrix(x.middleRows(start, len)));
    for (Eigen::Index r = 0; r < len; ++r) {
      Prediction pr;
      for (std::size_t c = 0; c < kOutputs; ++c) pr.probabilities[c] = p(r, static_cast<Eigen::Index>(c));
      pr.label = argmax(pr.probabilities);
      out.push_back(pr);
    }
  }
  return out;
}

}  // namespace entail::nn
