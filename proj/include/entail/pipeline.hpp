#pragma once
// End-to-end orchestration: join manifests with embedding stores, train the
// two sub-task classifiers, predict and consolidate, and score.

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "entail/config.hpp"
#include "entail/evec.hpp"
#include "entail/features.hpp"
#include "entail/labels.hpp"
#include "entail/manifest.hpp"
#include "entail/metrics.hpp"
#include "entail/nn/mlp.hpp"
#include "entail/nn/nnwt.hpp"
#include "entail/nn/train.hpp"

namespace entail {

inline constexpr std::size_t kTextEmbeddingDim = 384;
inline constexpr std::size_t kImageEmbeddingDim = 2048;

inline constexpr const char* kTextModelFile = "text_entail.nnwt";
inline constexpr const char* kImageModelFile = "image_entail.nnwt";

struct EvecPaths {
  std::filesystem::path text_claims;
  std::filesystem::path text_docs;
  std::filesystem::path image_claims;
  std::filesystem::path image_docs;
};

// One feature row per manifest record, in manifest order.
struct FeatureSet {
  std::vector<std::string> ids;
  nn::Matrix rows;
};

inline FeatureSet join(const Manifest& manifest, const EvecStore& claims, const EvecStore& docs) {
  if (claims.dim() != docs.dim())
    throw DimensionError("join: claim and document stores disagree on dim", claims.dim(), docs.dim());
  std::vector<std::string> missing_claims, missing_docs;
  for (const auto& r : manifest) {
    if (!claims.contains(r.id)) missing_claims.push_back(r.id);
    if (!docs.contains(r.id)) missing_docs.push_back(r.id);
  }
  if (!missing_claims.empty()) throw MissingIdsError("claim store", std::move(missing_claims));
  if (!missing_docs.empty()) throw MissingIdsError("document store", std::move(missing_docs));

  const std::size_t d = claims.dim();
  FeatureSet out;
  out.ids.reserve(manifest.size());
  // Row-major scratch so each row is a contiguous span for assemble_into.
  std::vector<double> row(pair_feature_dim(d)), claim(d), doc(d);
  out.rows.resize(static_cast<Eigen::Index>(manifest.size()), static_cast<Eigen::Index>(row.size()));
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto c = claims.at(manifest[i].id);
    const auto dd = docs.at(manifest[i].id);
    std::copy(c.begin(), c.end(), claim.begin());
    std::copy(dd.begin(), dd.end(), doc.begin());
    assemble_into(claim, doc, row);
    out.rows.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    out.ids.push_back(manifest[i].id);
  }
  return out;
}

struct ModalityStores {
  EvecStore claims;
  EvecStore docs;
};

inline ModalityStores load_stores(const std::filesystem::path& claims, const std::filesystem::path& docs,
                                  std::size_t expected_dim, const char* modality) {
  ModalityStores s{read_evec(claims), read_evec(docs)};
  if (s.claims.dim() != expected_dim)
    throw DimensionError(std::string(modality) + " claim store " + claims.string(), expected_dim, s.claims.dim());
  if (s.docs.dim() != expected_dim)
    throw DimensionError(std::string(modality) + " document store " + docs.string(), expected_dim, s.docs.dim());
  return s;
}

// ---------------------------------------------------------------------------
// Training

struct SubtaskLabels {
  std::vector<std::size_t> text;
  std::vector<std::size_t> image;
};

// Splits each gold category into its text and image entailment labels.
inline SubtaskLabels subtask_labels(const Manifest& manifest) {
  SubtaskLabels out;
  out.text.reserve(manifest.size());
  out.image.reserve(manifest.size());
  std::vector<std::string> unlabeled;
  for (const auto& r : manifest) {
    if (!r.category) {
      unlabeled.push_back(r.id);
      continue;
    }
    const auto pair = decompose(*r.category);
    out.text.push_back(index(pair.text));
    out.image.push_back(index(pair.image));
  }
  if (!unlabeled.empty()) throw MissingIdsError("gold categories", std::move(unlabeled));
  return out;
}

struct SubtaskResult {
  std::filesystem::path model_path;
  std::vector<double> loss_history;
  double train_accuracy = 0.0;
};

struct TrainOutcome {
  SubtaskResult text;
  SubtaskResult image;
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return nn::detail::splitmix64(seed ^ nn::detail::splitmix64(stream));
}

inline SubtaskResult train_subtask(nn::Preset preset, const nn::PresetOptions& options, const nn::Matrix& x,
                                   const std::vector<std::size_t>& labels, const PipelineConfig& config,
                                   std::uint64_t stream, const std::filesystem::path& out) {
  auto tc = config.train;
  tc.seed = derive_seed(config.train.seed, stream);
  auto model = nn::init_model(preset, derive_seed(config.train.seed, stream + 100), options);
  auto fitted = nn::fit(std::move(model), x, labels, tc);
  nn::save_model(fitted.model, out);
  return {out, std::move(fitted.loss_history), nn::accuracy(fitted.model, x, labels)};
}

inline TrainOutcome train_pipeline(const Manifest& manifest, const EvecPaths& paths, const PipelineConfig& config,
                                   const std::filesystem::path& out_dir) {
  if (manifest.empty()) throw Error("training manifest is empty");
  const auto labels = subtask_labels(manifest);
  std::filesystem::create_directories(out_dir);

  TrainOutcome outcome;
  {
    const auto text = load_stores(paths.text_claims, paths.text_docs, kTextEmbeddingDim, "text");
    const auto features = join(manifest, text.claims, text.docs);
    outcome.text = train_subtask(nn::Preset::TextEntail, config.text_options(), features.rows, labels.text,
                                 config, 1, out_dir / kTextModelFile);
  }
  {
    const auto image = load_stores(paths.image_claims, paths.image_docs, kImageEmbeddingDim, "image");
    const auto features = join(manifest, image.claims, image.docs);
    outcome.image = train_subtask(nn::Preset::ImageEntail, config.image_options(), features.rows, labels.image,
                                  config, 2, out_dir / kImageModelFile);
  }
  return outcome;
}

// ---------------------------------------------------------------------------
// Prediction

struct PredictionRecord {
  std::string id;
  TextLabel text_label = TextLabel::T0;
  ImageLabel image_label = ImageLabel::I0;
  bool pair_valid = true;
  FactifyLabel final_label = FactifyLabel::SupportMultimodal;
  std::array<double, 3> text_probs{};
  std::array<double, 3> image_probs{};

  LabelPair raw_pair() const noexcept { return {text_label, image_label}; }

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

inline PredictionRecord make_prediction(std::string id, const nn::Prediction& text, const nn::Prediction& image,
                                        const Heuristic& heuristic) {
  PredictionRecord p;
  p.id = std::move(id);
  p.text_label = text_label(text.label);
  p.image_label = image_label(image.label);
  p.pair_valid = is_valid(p.raw_pair());
  p.final_label = consolidate(p.raw_pair(), heuristic);
  p.text_probs = text.probabilities;
  p.image_probs = image.probabilities;
  return p;
}

inline std::vector<PredictionRecord> predict_pipeline(const Manifest& manifest, const EvecPaths& paths,
                                                      const nn::Mlp& text_model, const nn::Mlp& image_model,
                                                      const Heuristic& heuristic) {
  if (text_model.input_dim() != pair_feature_dim(kTextEmbeddingDim))
    throw DimensionError("text model input", pair_feature_dim(kTextEmbeddingDim), text_model.input_dim());
  if (image_model.input_dim() != pair_feature_dim(kImageEmbeddingDim))
    throw DimensionError("image model input", pair_feature_dim(kImageEmbeddingDim), image_model.input_dim());

  std::vector<nn::Prediction> text_preds, image_preds;
  {
    const auto text = load_stores(paths.text_claims, paths.text_docs, kTextEmbeddingDim, "text");
    text_preds = nn::predict(text_model, join(manifest, text.claims, text.docs).rows);
  }
  {
    const auto image = load_stores(paths.image_claims, paths.image_docs, kImageEmbeddingDim, "image");
    image_preds = nn::predict(image_model, join(manifest, image.claims, image.docs).rows);
  }
  std::vector<PredictionRecord> out;
  out.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i)
    out.push_back(make_prediction(manifest[i].id, text_preds[i], image_preds[i], heuristic));
  return out;
}

inline std::vector<PredictionRecord> predict_pipeline(const Manifest& manifest, const EvecPaths& paths,
                                                      const std::filesystem::path& models_dir,
                                                      const Heuristic& heuristic) {
  const auto text_model = nn::load_model(models_dir / kTextModelFile);
  const auto image_model = nn::load_model(models_dir / kImageModelFile);
  return predict_pipeline(manifest, paths, text_model, image_model, heuristic);
}

inline nlohmann::ordered_json to_json(const PredictionRecord& p) {
  return {{"id", p.id},
          {"text_label", to_string(p.text_label)},
          {"image_label", to_string(p.image_label)},
          {"pair_valid", p.pair_valid},
          {"final_label", to_string(p.final_label)},
          {"text_probs", p.text_probs},
          {"image_probs", p.image_probs}};
}

inline std::string to_jsonl(const std::vector<PredictionRecord>& predictions) {
  std::string out;
  for (const auto& p : predictions) {
    out += to_json(p).dump();
    out += '\n';
  }
  return out;
}

inline void write_predictions(const std::vector<PredictionRecord>& predictions, const std::filesystem::path& path) {
  io::write_file(path, to_jsonl(predictions));
}

inline std::vector<PredictionRecord> parse_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "predictions line " + std::to_string(line) + ": ";
    try {
      const auto j = nlohmann::json::parse(text);
      PredictionRecord p;
      p.id = j.at("id").get<std::string>();
      const auto t = parse_text_label(j.at("text_label").get<std::string>());
      const auto i = parse_image_label(j.at("image_label").get<std::string>());
      const auto f = parse_factify_label(j.at("final_label").get<std::string>());
      if (!t || !i || !f) throw Error(where + "unknown label");
      p.text_label = *t;
      p.image_label = *i;
      p.final_label = *f;
      p.pair_valid = j.at("pair_valid").get<bool>();
      p.text_probs = j.at("text_probs").get<std::array<double, 3>>();
      p.image_probs = j.at("image_probs").get<std::array<double, 3>>();
      if (p.pair_valid != is_valid(p.raw_pair())) throw Error(where + "pair_valid disagrees with the labels");
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw Error(where + e.what());
    }
  }
  return out;
}

inline std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions " + path.string());
  return parse_predictions(in);
}

// ---------------------------------------------------------------------------
// Evaluation

inline metrics::ClassReport evaluate_pipeline(const std::vector<PredictionRecord>& predictions,
                                              const Manifest& manifest) {
  std::unordered_map<std::string, std::optional<FactifyLabel>> gold_by_id;
  for (const auto& r : manifest) gold_by_id.emplace(r.id, r.category);
  std::vector<FactifyLabel> gold, pred;
  std::vector<std::string> ungraded;
  for (const auto& p : predictions) {
    auto it = gold_by_id.find(p.id);
    if (it == gold_by_id.end() || !it->second) {
      ungraded.push_back(p.id);
      continue;
    }
    gold.push_back(*it->second);
    pred.push_back(p.final_label);
  }
  if (!ungraded.empty()) throw MissingIdsError("gold labels in manifest", std::move(ungraded));
  return metrics::report(metrics::confusion(gold, pred));
}

}  // namespace entail
