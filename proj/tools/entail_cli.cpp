// entail: train / predict / evaluate the decomposed text+image entailment
// classifier from precomputed embedding stores.
//
// Exit codes: 0 success, 1 usage error, 2 data or format error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entail/entail.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

struct EvecArgs {
  std::string text_claims, text_docs, image_claims, image_docs;

  void attach(CLI::App* cmd) {
    cmd->add_option("--text-claims", text_claims, "EVEC store of claim text embeddings")->required();
    cmd->add_option("--text-docs", text_docs, "EVEC store of document text embeddings")->required();
    cmd->add_option("--image-claims", image_claims, "EVEC store of claim image embeddings")->required();
    cmd->add_option("--image-docs", image_docs, "EVEC store of document image embeddings")->required();
  }

  entail::EvecPaths paths() const { return {text_claims, text_docs, image_claims, image_docs}; }
};

entail::PipelineConfig config_from(const std::string& path) {
  auto cfg = path.empty() ? entail::PipelineConfig{} : entail::load_config(path);
  entail::apply_env_seed(cfg);
  return cfg;
}

void print_history(const char* name, const entail::SubtaskResult& r) {
  std::printf("%s model: %s\n", name, r.model_path.string().c_str());
  std::printf("  loss first/last epoch: %.6f / %.6f\n", r.loss_history.front(), r.loss_history.back());
  std::printf("  training accuracy: %.4f\n", r.train_accuracy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decomposed text/image entailment pipeline"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train the text and image entailment classifiers");
  std::string train_manifest, train_out, train_config;
  EvecArgs train_evec;
  train->add_option("--manifest", train_manifest, "Labelled JSONL manifest")->required();
  train_evec.attach(train);
  train->add_option("--out", train_out, "Output directory for the NNWT model files")->required();
  train->add_option("--config", train_config, "JSON run configuration");

  // predict
  auto* predict = app.add_subcommand("predict", "Predict consolidated labels for a manifest");
  std::string predict_manifest, predict_models, predict_out, predict_config, predict_heuristic;
  EvecArgs predict_evec;
  predict->add_option("--manifest", predict_manifest, "JSONL manifest")->required();
  predict->add_option("--models", predict_models, "Directory holding the trained models")->required();
  predict->add_option("--heuristic", predict_heuristic, "Invalid-pair heuristic (default prose-a)")
      ->check(CLI::IsMember({"prose-a", "table-a", "b"}, CLI::ignore_case));
  predict->add_option("--config", predict_config, "JSON configuration supplying a custom heuristic");
  predict_evec.attach(predict);
  predict->add_option("--out", predict_out, "Output predictions JSONL")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold labels");
  std::string eval_predictions, eval_manifest, eval_report, eval_confusion;
  evaluate->add_option("--predictions", eval_predictions, "Predictions JSONL")->required();
  evaluate->add_option("--manifest", eval_manifest, "Labelled JSONL manifest")->required();
  evaluate->add_option("--report", eval_report, "Output report JSON")->required();
  evaluate->add_option("--confusion", eval_confusion, "Output confusion matrix CSV");

  // inspect-evec
  auto* inspect = app.add_subcommand("inspect-evec", "Print the header and first ids of an EVEC store");
  std::string inspect_path;
  std::size_t inspect_show = 5;
  inspect->add_option("file", inspect_path, "EVEC file")->required();
  inspect->add_option("--show", inspect_show, "Number of ids to list");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic labelled dataset with planted structure");
  std::string synth_out;
  entail::synthetic::Options synth_opts;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--records", synth_opts.records, "Number of records");
  synth->add_option("--structure-seed", synth_opts.structure_seed, "Seed for the shared class structure");
  synth->add_option("--sample-seed", synth_opts.sample_seed, "Seed for the sampled records");
  synth->add_option("--id-prefix", synth_opts.id_prefix, "Record id prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*train) {
      const auto cfg = config_from(train_config);
      const auto manifest = entail::load_manifest(train_manifest);
      const auto outcome = entail::train_pipeline(manifest, train_evec.paths(), cfg, train_out);
      print_history("text", outcome.text);
      print_history("image", outcome.image);
    } else if (*predict) {
      std::optional<entail::Heuristic> heuristic;
      if (!predict_heuristic.empty())
        heuristic = entail::heuristics::by_name(predict_heuristic);
      else if (!predict_config.empty())
        heuristic = config_from(predict_config).heuristic;
      else
        heuristic = entail::heuristics::prose_a();
      const auto manifest = entail::load_manifest(predict_manifest);
      const auto preds = entail::predict_pipeline(manifest, predict_evec.paths(), predict_models, *heuristic);
      entail::write_predictions(preds, predict_out);
      std::size_t invalid = 0;
      for (const auto& p : preds) invalid += p.pair_valid ? 0 : 1;
      std::printf("%zu predictions written to %s (%zu invalid raw pairs rewritten by %s)\n", preds.size(),
                  predict_out.c_str(), invalid, heuristic->name().c_str());
    } else if (*evaluate) {
      const auto preds = entail::read_predictions(eval_predictions);
      const auto manifest = entail::load_manifest(eval_manifest);
      const auto report = entail::evaluate_pipeline(preds, manifest);
      entail::io::write_file(eval_report, entail::metrics::to_json(report).dump(2) + "\n");
      if (!eval_confusion.empty()) entail::io::write_file(eval_confusion, entail::metrics::to_csv(report.confusion));
      std::printf("weighted F1: %.5f over %llu records\n", report.weighted_f1,
                  static_cast<unsigned long long>(report.confusion.total()));
    } else if (*inspect) {
      const auto store = entail::read_evec(inspect_path);
      std::printf("dim: %zu\ncount: %zu\n", store.dim(), store.size());
      const std::size_t n = std::min(inspect_show, store.size());
      if (n > 0) std::printf("first ids:\n");
      for (std::size_t i = 0; i < n; ++i) std::printf("  %s\n", store.ids()[i].c_str());
    } else if (*synth) {
      const auto data = entail::synthetic::generate(synth_opts);
      entail::synthetic::write(data, synth_out);
      std::printf("wrote %zu records to %s\n", data.manifest.size(), synth_out.c_str());
    }
  } catch (const entail::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
