#pragma once
// Confusion matrix and support-weighted F1 over the five fact-checking
// classes. Rows are gold labels, columns predictions, both in kAllLabels order.

#include <array>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "entail/labels.hpp"

namespace entail::metrics {

struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  std::uint64_t at(FactifyLabel gold, FactifyLabel pred) const noexcept {
    return counts[index(gold)][index(pred)];
  }

  std::uint64_t total() const noexcept {
    std::uint64_t n = 0;
    for (const auto& row : counts)
      for (auto c : row) n += c;
    return n;
  }

  std::uint64_t row_sum(std::size_t g) const noexcept {
    std::uint64_t n = 0;
    for (auto c : counts[g]) n += c;
    return n;
  }

  std::uint64_t column_sum(std::size_t p) const noexcept {
    std::uint64_t n = 0;
    for (const auto& row : counts) n += row[p];
    return n;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const FactifyLabel> gold, std::span<const FactifyLabel> pred) {
  if (gold.size() != pred.size())
    throw Error("confusion: " + std::to_string(gold.size()) + " gold labels vs " +
                std::to_string(pred.size()) + " predictions");
  if (gold.empty()) throw Error("confusion: no labels to score");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < gold.size(); ++i) ++cm.counts[index(gold[i])][index(pred[i])];
  return cm;
}

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct ClassReport {
  std::array<ClassScores, kNumClasses> per_class{};
  double weighted_f1 = 0.0;
  ConfusionMatrix confusion;
};

// Empty column gives precision 0, empty row recall 0, p + r = 0 gives f1 0.
inline ClassReport report(const ConfusionMatrix& cm) {
  const std::uint64_t n = cm.total();
  if (n == 0) throw Error("report: confusion matrix is empty");
  ClassReport r;
  r.confusion = cm;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto diag = static_cast<double>(cm.counts[c][c]);
    const auto col = cm.column_sum(c);
    const auto row = cm.row_sum(c);
    auto& s = r.per_class[c];
    s.support = row;
    s.precision = col == 0 ? 0.0 : diag / static_cast<double>(col);
    s.recall = row == 0 ? 0.0 : diag / static_cast<double>(row);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    r.weighted_f1 += static_cast<double>(row) * s.f1;
  }
  r.weighted_f1 /= static_cast<double>(n);
  return r;
}

inline nlohmann::ordered_json to_json(const ClassReport& r) {
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  nlohmann::ordered_json matrix = nlohmann::ordered_json::object();
  for (auto l : kAllLabels) {
    const auto& s = r.per_class[index(l)];
    per_class[std::string(to_string(l))] = {
        {"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"support", s.support}};
    nlohmann::ordered_json row = nlohmann::ordered_json::object();
    for (auto p : kAllLabels) row[std::string(to_string(p))] = r.confusion.at(l, p);
    matrix[std::string(to_string(l))] = std::move(row);
  }
  nlohmann::ordered_json j;
  j["per_class"] = std::move(per_class);
  j["weighted_f1"] = r.weighted_f1;
  j["total"] = r.confusion.total();
  j["confusion"] = std::move(matrix);  // gold -> predicted -> count
  return j;
}

// Header "gold\pred,<labels>", then one row per gold label.
inline std::string to_csv(const ConfusionMatrix& cm) {
  std::ostringstream os;
  os << "gold\\pred";
  for (auto l : kAllLabels) os << ',' << to_string(l);
  os << '\n';
  for (auto g : kAllLabels) {
    os << to_string(g);
    for (auto p : kAllLabels) os << ',' << cm.at(g, p);
    os << '\n';
  }
  return os.str();
}

}  // namespace entail::metrics
