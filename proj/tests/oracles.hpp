#pragma once
// Test-only reference computations. These deliberately avoid Eigen and the
// library's own code paths: plain loops over nested std::vectors.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "entail/labels.hpp"
#include "entail/nn/mlp.hpp"

namespace oracle {

using Grid = std::vector<std::vector<double>>;

struct PlainLayer {
  Grid w;  // in x out
  std::vector<double> b;
  bool relu;
  double reg;
};

inline std::vector<PlainLayer> copy_layers(const entail::nn::Mlp& m) {
  std::vector<PlainLayer> out;
  for (const auto& l : m.layers()) {
    PlainLayer p;
    p.w.assign(l.spec.in_dim, std::vector<double>(l.spec.out_dim));
    for (std::size_t i = 0; i < l.spec.in_dim; ++i)
      for (std::size_t j = 0; j < l.spec.out_dim; ++j)
        p.w[i][j] = l.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    for (std::size_t j = 0; j < l.spec.out_dim; ++j) p.b.push_back(l.bias(static_cast<Eigen::Index>(j)));
    p.relu = l.spec.activation == entail::nn::Activation::ReLU;
    p.reg = l.spec.activity_reg;
    out.push_back(std::move(p));
  }
  return out;
}

// Infer-mode forward pass for one example; returns softmax(sigmoid(.)) and
// accumulates the activity penalty sum_k reg_k * sum_j a_j^2 into `penalty`.
inline std::array<double, 3> forward(const std::vector<PlainLayer>& layers, const std::vector<double>& x,
                                     double* penalty = nullptr) {
  std::vector<double> a = x;
  for (const auto& l : layers) {
    std::vector<double> z(l.b);
    for (std::size_t j = 0; j < z.size(); ++j)
      for (std::size_t i = 0; i < a.size(); ++i) z[j] += a[i] * l.w[i][j];
    for (auto& v : z) v = l.relu ? std::max(v, 0.0) : 1.0 / (1.0 + std::exp(-v));
    if (penalty)
      for (double v : z) *penalty += l.reg * v * v;
    a = std::move(z);
  }
  const double e0 = std::exp(a[0]), e1 = std::exp(a[1]), e2 = std::exp(a[2]);
  const double s = e0 + e1 + e2;
  return {e0 / s, e1 / s, e2 / s};
}

inline double loss(const std::vector<PlainLayer>& layers, const Grid& xs, const Grid& ys) {
  double total = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    double penalty = 0.0;
    const auto p = forward(layers, xs[n], &penalty);
    for (std::size_t c = 0; c < 3; ++c) total -= ys[n][c] * std::log(std::max(p[c], 1e-12));
    total += penalty;
  }
  return total / static_cast<double>(xs.size());
}

// Central finite differences of `f`, perturbing each pointed-to parameter in
// place.
inline std::vector<double> central_differences(const std::function<double()>& f,
                                               const std::vector<double*>& params, double h) {
  std::vector<double> g;
  g.reserve(params.size());
  for (double* p : params) {
    const double saved = *p;
    *p = saved + h;
    const double up = f();
    *p = saved - h;
    const double down = f();
    *p = saved;
    g.push_back((up - down) / (2.0 * h));
  }
  return g;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-7});
}

// Largest relative error between the library's analytic gradients (dropout
// disabled) and central differences of the plain-loop loss above.
inline double max_gradient_error(const entail::nn::Mlp& model, const entail::nn::Matrix& x,
                                 const entail::nn::Matrix& y, double h = 1e-5) {
  const auto g = entail::nn::gradients(model, x, y);
  auto layers = copy_layers(model);
  Grid xs(static_cast<std::size_t>(x.rows())), ys(static_cast<std::size_t>(y.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) xs[r].push_back(x(r, c));
    for (Eigen::Index c = 0; c < y.cols(); ++c) ys[r].push_back(y(r, c));
  }
  std::vector<double*> params;
  std::vector<double> analytic;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    for (std::size_t i = 0; i < layers[k].w.size(); ++i)
      for (std::size_t j = 0; j < layers[k].w[i].size(); ++j) {
        params.push_back(&layers[k].w[i][j]);
        analytic.push_back(g.weights[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    for (std::size_t j = 0; j < layers[k].b.size(); ++j) {
      params.push_back(&layers[k].b[j]);
      analytic.push_back(g.bias[k](static_cast<Eigen::Index>(j)));
    }
  }
  const auto numeric = central_differences([&] { return loss(layers, xs, ys); }, params, h);
  double worst = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) worst = std::max(worst, relative_error(analytic[i], numeric[i]));
  return worst;
}

inline entail::nn::Mlp reduced_model(bool text_shaped, double reg, std::uint64_t seed) {
  using entail::nn::Activation;
  std::vector<entail::nn::LayerSpec> specs;
  if (text_shaped)
    specs = {{9, 8, Activation::ReLU, 0.0, reg}, {8, 8, Activation::ReLU, 0.0, reg}, {8, 3, Activation::Sigmoid, 0.0, 0.0}};
  else
    specs = {{9, 12, Activation::ReLU, 0.0, reg}, {12, 3, Activation::Sigmoid, 0.0, 0.0}};
  auto m = entail::nn::init_model(specs, seed);
  // Non-zero biases so the bias gradients are exercised away from the origin.
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (auto& l : m.mutable_layers())
    for (Eigen::Index j = 0; j < l.bias.size(); ++j) l.bias(j) = u(rng);
  return m;
}

inline std::pair<entail::nn::Matrix, entail::nn::Matrix> random_batch(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::uniform_int_distribution<int> cls(0, 2);
  entail::nn::Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  entail::nn::Matrix y = entail::nn::Matrix::Zero(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = d(rng);
    y(r, cls(rng)) = 1.0;
  }
  return {x, y};
}

// Brute-force per-class tally, independent of ConfusionMatrix.
struct Tally {
  double weighted_f1 = 0.0;
  std::array<double, 5> precision{}, recall{}, f1{};
  std::array<std::size_t, 5> support{};
  std::array<std::array<std::size_t, 5>, 5> cells{};
};

inline Tally tally(const std::vector<entail::FactifyLabel>& gold, const std::vector<entail::FactifyLabel>& pred) {
  Tally t;
  const std::size_t n = gold.size();
  for (std::size_t g = 0; g < 5; ++g)
    for (std::size_t p = 0; p < 5; ++p)
      for (std::size_t i = 0; i < n; ++i)
        if (entail::index(gold[i]) == g && entail::index(pred[i]) == p) ++t.cells[g][p];
  for (std::size_t c = 0; c < 5; ++c) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool is_gold = entail::index(gold[i]) == c;
      const bool is_pred = entail::index(pred[i]) == c;
      tp += is_gold && is_pred;
      fp += !is_gold && is_pred;
      fn += is_gold && !is_pred;
    }
    t.support[c] = tp + fn;
    t.precision[c] = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    t.recall[c] = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    t.f1[c] = tp == 0 ? 0.0 : 2.0 * double(tp) / double(2 * tp + fp + fn);
    t.weighted_f1 += double(t.support[c]) / double(n) * t.f1[c];
  }
  return t;
}

inline std::vector<entail::FactifyLabel> random_labels(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, 4);
  std::vector<entail::FactifyLabel> out(n);
  for (auto& l : out) l = static_cast<entail::FactifyLabel>(d(rng));
  return out;
}

// 3-class isotropic Gaussian blobs with unit sigma; centers sit on scaled
// coordinate axes so every pair is `separation` sigmas apart.
struct Blobs {
  entail::nn::Matrix x;
  std::vector<std::size_t> labels;
};

inline Blobs gaussian_blobs(std::size_t n, std::size_t dim, double separation, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double axis = separation / std::sqrt(2.0);
  Blobs b{entail::nn::Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim)), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % 3;
    b.labels.push_back(c);
    for (std::size_t j = 0; j < dim; ++j)
      b.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (j == c ? axis : 0.0) + noise(rng);
  }
  return b;
}

}  // namespace oracle
