#pragma once
// JSON run configuration. Every key is optional:
//
//   {
//     "optimizer": "adam" | "sgd",
//     "learning_rate": 0.001,
//     "batch_size": 64,
//     "epochs": 30,
//     "seed": 0,
//     "shuffle": true,
//     "activity_reg_coeff": 0.0001,
//     "dropout": {"image": [0.5], "text": [0.55, 0.4]},
//     "heuristic": "prose-a"            (or a custom rewrite table)
//   }
//
// ENTAIL_SEED, when set, overrides "seed".

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "entail/labels.hpp"
#include "entail/nn/train.hpp"

namespace entail {

struct PipelineConfig {
  nn::TrainConfig train{};
  double activity_reg = 1e-4;
  std::vector<double> image_dropout{};  // empty keeps the architecture defaults
  std::vector<double> text_dropout{};
  Heuristic heuristic = heuristics::prose_a();

  nn::PresetOptions image_options() const { return {0.0, image_dropout}; }
  nn::PresetOptions text_options() const { return {activity_reg, text_dropout}; }
};

namespace detail {

template <typename T>
T config_value(const nlohmann::json& j, const char* key) {
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!j.at(key).is_number_unsigned())
      throw Error(std::string("config key '") + key + "' must be a non-negative integer");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("config key '") + key + "' has the wrong type");
  }
}

inline std::vector<double> dropout_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (!v.is_array()) throw Error(std::string("config dropout.") + key + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(std::string("config dropout.") + key + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace detail

inline std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("ENTAIL_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(std::string("ENTAIL_SEED must be a non-negative integer, got '") + raw + "'");
  }
}

inline PipelineConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  static const std::vector<std::string> known = {
      "optimizer", "learning_rate", "batch_size", "epochs", "seed", "shuffle",
      "activity_reg_coeff", "dropout", "heuristic"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error("unknown config key '" + key + "'");

  PipelineConfig c;
  auto& t = c.train;
  if (j.contains("optimizer")) {
    const auto name = detail::config_value<std::string>(j, "optimizer");
    if (detail::iequals(name, "adam"))
      t.optimizer = nn::Optimizer::Adam;
    else if (detail::iequals(name, "sgd"))
      t.optimizer = nn::Optimizer::SGD;
    else
      throw Error("unknown optimizer '" + name + "' (expected adam or sgd)");
  }
  if (j.contains("learning_rate")) t.learning_rate = detail::config_value<double>(j, "learning_rate");
  if (j.contains("batch_size")) t.batch_size = detail::config_value<std::size_t>(j, "batch_size");
  if (j.contains("epochs")) t.epochs = detail::config_value<std::size_t>(j, "epochs");
  if (j.contains("seed")) t.seed = detail::config_value<std::uint64_t>(j, "seed");
  if (j.contains("shuffle")) t.shuffle = detail::config_value<bool>(j, "shuffle");
  if (j.contains("activity_reg_coeff")) c.activity_reg = detail::config_value<double>(j, "activity_reg_coeff");
  if (j.contains("dropout")) {
    const auto& d = j.at("dropout");
    if (!d.is_object()) throw Error("config dropout must be an object with 'image' / 'text' arrays");
    c.image_dropout = detail::dropout_list(d, "image");
    c.text_dropout = detail::dropout_list(d, "text");
  }
  if (j.contains("heuristic")) c.heuristic = heuristic_from_json(j.at("heuristic"));

  t.validate();
  if (!(std::isfinite(c.activity_reg) && c.activity_reg >= 0.0))
    throw Error("activity_reg_coeff must be finite and >= 0");
  // Surface bad dropout overrides now rather than at training time.
  nn::expand(nn::Preset::ImageEntail, c.image_options());
  nn::expand(nn::Preset::TextEntail, c.text_options());
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

inline void apply_env_seed(PipelineConfig& c) {
  if (auto s = seed_from_env()) c.train.seed = *s;
}

}  // namespace entail
