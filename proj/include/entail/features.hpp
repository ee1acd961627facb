#pragma once
// Classifier input construction: [claim | cosine(claim, doc) | doc].

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "entail/error.hpp"

namespace entail {

class EmbeddingVector {
 public:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw Error("embedding vector must have dim > 0");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw Error("embedding vector entry " + std::to_string(i) + " is not finite");
    }
  }

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

// Cosine similarity clamped to [-1, 1]. Zero-norm inputs give 0.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine: dimension mismatch", a.size(), b.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine(a.values(), b.values());
}

inline std::size_t pair_feature_dim(std::size_t embedding_dim) noexcept {
  return 2 * embedding_dim + 1;
}

// Writes the 2d+1 layout into `out`, which must already have that size.
inline void assemble_into(std::span<const double> claim, std::span<const double> doc,
                          std::span<double> out) {
  if (claim.size() != doc.size())
    throw DimensionError("assemble: claim/document dimension mismatch", claim.size(), doc.size());
  if (out.size() != pair_feature_dim(claim.size()))
    throw DimensionError("assemble: output buffer", pair_feature_dim(claim.size()), out.size());
  const std::size_t d = claim.size();
  std::copy(claim.begin(), claim.end(), out.begin());
  out[d] = cosine(claim, doc);
  std::copy(doc.begin(), doc.end(), out.begin() + static_cast<std::ptrdiff_t>(d + 1));
}

struct PairFeatures {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  std::size_t embedding_dim() const noexcept { return (values.size() - 1) / 2; }

  std::span<const double> claim() const noexcept {
    return std::span<const double>(values).first(embedding_dim());
  }
  double similarity() const noexcept { return values[embedding_dim()]; }
  std::span<const double> document() const noexcept {
    return std::span<const double>(values).last(embedding_dim());
  }
};

inline PairFeatures assemble(const EmbeddingVector& claim, const EmbeddingVector& doc) {
  if (claim.dim() != doc.dim())
    throw DimensionError("assemble: claim/document dimension mismatch", claim.dim(), doc.dim());
  PairFeatures f{std::vector<double>(pair_feature_dim(claim.dim()))};
  assemble_into(claim.values(), doc.values(), f.values);
  return f;
}

}  // namespace entail
