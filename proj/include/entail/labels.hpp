#pragma once
// Five-way fact-checking classes and their decomposition into independent
// text / image entailment sub-labels, plus the rewriting rules that map the
// four impossible sub-label combinations back onto a real class.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "entail/error.hpp"

namespace entail {

enum class FactifyLabel : std::uint8_t {
  SupportMultimodal = 0,
  SupportText = 1,
  InsufficientMultimodal = 2,
  InsufficientText = 3,
  Refute = 4,
};

inline constexpr std::size_t kNumClasses = 5;

inline constexpr std::array<FactifyLabel, kNumClasses> kAllLabels = {
    FactifyLabel::SupportMultimodal, FactifyLabel::SupportText,
    FactifyLabel::InsufficientMultimodal, FactifyLabel::InsufficientText, FactifyLabel::Refute};

// Sub-task labels: 0 entailed, 1 not entailed, 2 refuted.
enum class TextLabel : std::uint8_t { T0 = 0, T1 = 1, T2 = 2 };
enum class ImageLabel : std::uint8_t { I0 = 0, I1 = 1, I2 = 2 };

inline constexpr std::size_t kNumSubLabels = 3;

struct LabelPair {
  TextLabel text;
  ImageLabel image;

  friend constexpr bool operator==(const LabelPair&, const LabelPair&) = default;
};

constexpr std::size_t index(FactifyLabel l) noexcept { return static_cast<std::size_t>(l); }
constexpr std::size_t index(TextLabel l) noexcept { return static_cast<std::size_t>(l); }
constexpr std::size_t index(ImageLabel l) noexcept { return static_cast<std::size_t>(l); }

constexpr TextLabel text_label(std::size_t i) { return static_cast<TextLabel>(i); }
constexpr ImageLabel image_label(std::size_t i) { return static_cast<ImageLabel>(i); }

// ---------------------------------------------------------------------------
// String forms

constexpr std::string_view to_string(FactifyLabel l) noexcept {
  switch (l) {
    case FactifyLabel::SupportMultimodal: return "Support_Multimodal";
    case FactifyLabel::SupportText: return "Support_Text";
    case FactifyLabel::InsufficientMultimodal: return "Insufficient_Multimodal";
    case FactifyLabel::InsufficientText: return "Insufficient_Text";
    case FactifyLabel::Refute: return "Refute";
  }
  return "?";
}

constexpr std::string_view to_string(TextLabel l) noexcept {
  constexpr std::array<std::string_view, 3> names = {"T0", "T1", "T2"};
  return names[index(l)];
}

constexpr std::string_view to_string(ImageLabel l) noexcept {
  constexpr std::array<std::string_view, 3> names = {"I0", "I1", "I2"};
  return names[index(l)];
}

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace detail

// Case-insensitive; "support_text" and "SUPPORT_TEXT" both yield SupportText.
inline std::optional<FactifyLabel> parse_factify_label(std::string_view s) {
  for (auto l : kAllLabels)
    if (detail::iequals(s, to_string(l))) return l;
  return std::nullopt;
}

inline std::optional<TextLabel> parse_text_label(std::string_view s) {
  for (std::size_t i = 0; i < kNumSubLabels; ++i)
    if (detail::iequals(s, to_string(text_label(i)))) return text_label(i);
  return std::nullopt;
}

inline std::optional<ImageLabel> parse_image_label(std::string_view s) {
  for (std::size_t i = 0; i < kNumSubLabels; ++i)
    if (detail::iequals(s, to_string(image_label(i)))) return image_label(i);
  return std::nullopt;
}

inline std::ostream& operator<<(std::ostream& os, FactifyLabel l) { return os << to_string(l); }
inline std::ostream& operator<<(std::ostream& os, TextLabel l) { return os << to_string(l); }
inline std::ostream& operator<<(std::ostream& os, ImageLabel l) { return os << to_string(l); }
inline std::ostream& operator<<(std::ostream& os, const LabelPair& p) {
  return os << '(' << p.text << ", " << p.image << ')';
}

// ---------------------------------------------------------------------------
// Decomposition

constexpr LabelPair decompose(FactifyLabel l) noexcept {
  switch (l) {
    case FactifyLabel::SupportMultimodal: return {TextLabel::T0, ImageLabel::I0};
    case FactifyLabel::SupportText: return {TextLabel::T0, ImageLabel::I1};
    case FactifyLabel::InsufficientMultimodal: return {TextLabel::T1, ImageLabel::I0};
    case FactifyLabel::InsufficientText: return {TextLabel::T1, ImageLabel::I1};
    case FactifyLabel::Refute: return {TextLabel::T2, ImageLabel::I2};
  }
  return {TextLabel::T2, ImageLabel::I2};
}

// nullopt marks one of the four invalid combinations.
constexpr std::optional<FactifyLabel> compose(LabelPair p) noexcept {
  for (auto l : kAllLabels)
    if (decompose(l) == p) return l;
  return std::nullopt;
}

constexpr bool is_valid(LabelPair p) noexcept { return compose(p).has_value(); }

// Fixed order: (T0,I2), (T1,I2), (T2,I0), (T2,I1). Heuristic tables are
// indexed by position in this list.
constexpr std::array<LabelPair, 4> invalid_pairs() noexcept {
  return {{{TextLabel::T0, ImageLabel::I2},
           {TextLabel::T1, ImageLabel::I2},
           {TextLabel::T2, ImageLabel::I0},
           {TextLabel::T2, ImageLabel::I1}}};
}

constexpr std::array<LabelPair, 9> all_pairs() noexcept {
  std::array<LabelPair, 9> out{};
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t i = 0; i < 3; ++i) out[t * 3 + i] = {text_label(t), image_label(i)};
  return out;
}

// ---------------------------------------------------------------------------
// Consolidation heuristics

class Heuristic {
 public:
  // `rewrites[k]` is the replacement for invalid_pairs()[k]; each must be valid.
  Heuristic(std::string name, std::array<LabelPair, 4> rewrites)
      : name_(std::move(name)), rewrites_(rewrites) {
    for (std::size_t k = 0; k < rewrites_.size(); ++k) {
      if (!is_valid(rewrites_[k])) {
        throw Error("heuristic '" + name_ + "' rewrites " + describe(invalid_pairs()[k]) +
                    " to invalid pair " + describe(rewrites_[k]));
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::array<LabelPair, 4>& rewrites() const noexcept { return rewrites_; }

  // Identity on valid pairs.
  LabelPair rewrite(LabelPair p) const noexcept {
    const auto inv = invalid_pairs();
    for (std::size_t k = 0; k < inv.size(); ++k)
      if (inv[k] == p) return rewrites_[k];
    return p;
  }

  static std::string describe(LabelPair p) {
    return std::string(to_string(p.text)) + "," + std::string(to_string(p.image));
  }

 private:
  std::string name_;
  std::array<LabelPair, 4> rewrites_;
};

namespace heuristics {

// Rules as worded: an entailed mode demotes a refuted partner to
// not-entailed; a refuted mode promotes a not-entailed partner to refuted.
inline Heuristic prose_a() {
  using T = TextLabel;
  using I = ImageLabel;
  return Heuristic("prose-a", {{{T::T0, I::I1}, {T::T2, I::I2}, {T::T1, I::I0}, {T::T2, I::I2}}});
}

// Table rows as printed; differs from prose_a() on (T2,I0) and (T2,I1).
inline Heuristic table_a() {
  using T = TextLabel;
  using I = ImageLabel;
  return Heuristic("table-a", {{{T::T0, I::I1}, {T::T2, I::I2}, {T::T2, I::I2}, {T::T1, I::I0}}});
}

// Image label takes the text label's index.
inline Heuristic b() {
  using T = TextLabel;
  using I = ImageLabel;
  return Heuristic("b", {{{T::T0, I::I0}, {T::T1, I::I1}, {T::T2, I::I2}, {T::T2, I::I2}}});
}

inline std::array<Heuristic, 3> shipped() { return {prose_a(), table_a(), b()}; }

inline Heuristic by_name(std::string_view name) {
  for (auto& h : shipped())
    if (detail::iequals(name, h.name())) return h;
  throw Error("unknown heuristic '" + std::string(name) + "' (expected prose-a, table-a or b)");
}

}  // namespace heuristics

inline FactifyLabel consolidate(LabelPair p, const Heuristic& h) {
  // The constructor guarantees every rewrite target composes.
  return *compose(h.rewrite(p));
}

// JSON form of a custom heuristic:
//   {"name": "...", "rewrites": {"T0,I2": "T0,I1", "T1,I2": ..., "T2,I0": ..., "T2,I1": ...}}
inline nlohmann::json heuristic_to_json(const Heuristic& h) {
  nlohmann::json rewrites = nlohmann::json::object();
  const auto inv = invalid_pairs();
  for (std::size_t k = 0; k < inv.size(); ++k)
    rewrites[Heuristic::describe(inv[k])] = Heuristic::describe(h.rewrites()[k]);
  return {{"name", h.name()}, {"rewrites", rewrites}};
}

inline LabelPair parse_label_pair(std::string_view s) {
  const auto comma = s.find(',');
  if (comma != std::string_view::npos) {
    auto t = parse_text_label(s.substr(0, comma));
    auto i = parse_image_label(s.substr(comma + 1));
    if (t && i) return {*t, *i};
  }
  throw Error("bad label pair '" + std::string(s) + "' (expected e.g. \"T0,I1\")");
}

inline Heuristic heuristic_from_json(const nlohmann::json& j) {
  if (j.is_string()) return heuristics::by_name(j.get<std::string>());
  if (!j.is_object() || !j.contains("rewrites") || !j["rewrites"].is_object())
    throw Error("heuristic must be a name or an object with a \"rewrites\" table");
  const auto& table = j["rewrites"];
  const auto inv = invalid_pairs();
  std::array<LabelPair, 4> rewrites{};
  for (std::size_t k = 0; k < inv.size(); ++k) {
    const auto key = Heuristic::describe(inv[k]);
    if (!table.contains(key) || !table[key].is_string())
      throw Error("heuristic table lacks an entry for " + key);
    rewrites[k] = parse_label_pair(table[key].get<std::string>());
  }
  if (table.size() != inv.size())
    throw Error("heuristic table must have exactly 4 entries, one per invalid pair");
  return Heuristic(j.value("name", std::string("custom")), rewrites);
}

}  // namespace entail
