#pragma once
// Newline-delimited JSON manifest of claim/document records.

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "entail/labels.hpp"

namespace entail {

struct ManifestRecord {
  std::string id;
  std::string claim_text;
  std::string document_text;
  std::string claim_image;
  std::string document_image;
  std::optional<FactifyLabel> category;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

using Manifest = std::vector<ManifestRecord>;

namespace detail {

inline std::string optional_string(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw ManifestError(line, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace detail

// Blank lines are skipped; unknown fields are ignored. Line numbers are 1-based.
inline Manifest parse_manifest(std::istream& in) {
  Manifest out;
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ManifestError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ManifestError(line, "expected a JSON object");

    ManifestRecord rec;
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string() || id->get<std::string>().empty())
      throw ManifestError(line, "missing or empty string field 'id'");
    rec.id = id->get<std::string>();
    if (!seen.insert(rec.id).second) throw ManifestError(line, "duplicate id '" + rec.id + "'");
    rec.claim_text = detail::optional_string(obj, "claim_text", line);
    rec.document_text = detail::optional_string(obj, "document_text", line);
    rec.claim_image = detail::optional_string(obj, "claim_image", line);
    rec.document_image = detail::optional_string(obj, "document_image", line);
    const auto category = detail::optional_string(obj, "category", line);
    if (!category.empty()) {
      rec.category = parse_factify_label(category);
      if (!rec.category) throw ManifestError(line, "unknown category '" + category + "'");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  return parse_manifest(in);
}

inline nlohmann::ordered_json to_json(const ManifestRecord& r) {
  nlohmann::ordered_json j = {{"id", r.id},
                              {"claim_text", r.claim_text},
                              {"document_text", r.document_text},
                              {"claim_image", r.claim_image},
                              {"document_image", r.document_image}};
  if (r.category) j["category"] = std::string(to_string(*r.category));
  return j;
}

inline void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& r : manifest) out << to_json(r).dump() << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace entail
