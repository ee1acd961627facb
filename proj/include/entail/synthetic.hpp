#pragma once
// Synthetic labelled data with planted, learnable structure. For each
// modality the sub-task label fixes how the document embedding relates to
// the claim embedding:
//
//   entailed      doc ~ +claim          (cosine near +alignment)
//   not entailed  doc independent       (cosine near 0)
//   refuted       doc ~ -claim          (cosine near -alignment)
//
// and the document also carries a per-label signature direction shared by
// every record. Signatures depend only on `structure_seed`, so datasets drawn
// with different `sample_seed`s are train/test splits of one distribution.
// A small fraction of image documents is pure noise, which makes some raw
// sub-label pairs come out invalid at prediction time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "entail/evec.hpp"
#include "entail/labels.hpp"
#include "entail/manifest.hpp"
#include "entail/pipeline.hpp"

namespace entail::synthetic {

struct Options {
  std::size_t records = 500;
  std::uint64_t structure_seed = 7;
  std::uint64_t sample_seed = 1;
  std::size_t text_dim = kTextEmbeddingDim;
  std::size_t image_dim = kImageEmbeddingDim;
  double alignment = 0.8;         // weight of +-claim in the document
  double signature = 0.6;         // weight of the label signature
  double noise = 0.6;             // weight of isotropic noise
  double image_noise_only = 0.03; // fraction of image documents with no signal
  std::string id_prefix = "syn";
};

struct Dataset {
  Manifest manifest;
  EvecStore text_claims;
  EvecStore text_docs;
  EvecStore image_claims;
  EvecStore image_docs;
};

namespace detail {

inline std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  double norm = 0.0;
  for (auto& x : v) {
    x = n(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

inline void normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (auto& x : v) x /= norm;
}

struct Modality {
  std::vector<std::vector<double>> signatures;  // one per sub-label

  Modality(std::size_t dim, std::mt19937_64& rng) {
    for (std::size_t k = 0; k < kNumSubLabels; ++k) signatures.push_back(random_unit(dim, rng));
  }

  void sample(std::size_t label, bool noise_only, const Options& o, std::mt19937_64& rng,
              std::vector<double>& claim, std::vector<double>& doc) const {
    const std::size_t dim = signatures.front().size();
    claim = random_unit(dim, rng);
    const auto noise = random_unit(dim, rng);
    if (noise_only) {
      doc = noise;
      return;
    }
    const double sign = label == 0 ? 1.0 : (label == 2 ? -1.0 : 0.0);
    doc.assign(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      doc[i] = sign * o.alignment * claim[i] + o.signature * signatures[label][i] + o.noise * noise[i];
    normalize(doc);
  }
};

}  // namespace detail

inline Dataset generate(const Options& o) {
  std::mt19937_64 structure_rng(o.structure_seed);
  const detail::Modality text(o.text_dim, structure_rng);
  const detail::Modality image(o.image_dim, structure_rng);

  std::mt19937_64 rng(nn::detail::splitmix64(o.sample_seed) ^ o.structure_seed);
  // Balanced classes, shuffled.
  std::vector<FactifyLabel> classes(o.records);
  for (std::size_t i = 0; i < o.records; ++i) classes[i] = kAllLabels[i % kNumClasses];
  std::shuffle(classes.begin(), classes.end(), rng);

  Dataset d{{}, EvecStore(o.text_dim), EvecStore(o.text_dim), EvecStore(o.image_dim), EvecStore(o.image_dim)};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> claim, doc;
  for (std::size_t i = 0; i < o.records; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%05zu", o.id_prefix.c_str(), i);
    const std::string id = buf;
    const auto pair = decompose(classes[i]);

    ManifestRecord rec;
    rec.id = id;
    rec.claim_text = "synthetic claim " + id;
    rec.document_text = "synthetic document " + id;
    rec.claim_image = "images/" + id + "_claim.png";
    rec.document_image = "images/" + id + "_document.png";
    rec.category = classes[i];
    d.manifest.push_back(std::move(rec));

    text.sample(index(pair.text), false, o, rng, claim, doc);
    d.text_claims.add(id, std::span<const double>(claim));
    d.text_docs.add(id, std::span<const double>(doc));

    const bool noise_only = u(rng) < o.image_noise_only;
    image.sample(index(pair.image), noise_only, o, rng, claim, doc);
    d.image_claims.add(id, std::span<const double>(claim));
    d.image_docs.add(id, std::span<const double>(doc));
  }
  return d;
}

// Writes manifest.jsonl plus the four EVEC stores into `dir` and returns
// the store paths.
inline EvecPaths write(const Dataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  EvecPaths p{dir / "text_claims.evec", dir / "text_docs.evec", dir / "image_claims.evec",
              dir / "image_docs.evec"};
  write_manifest(d.manifest, dir / "manifest.jsonl");
  write_evec(d.text_claims, p.text_claims);
  write_evec(d.text_docs, p.text_docs);
  write_evec(d.image_claims, p.image_claims);
  write_evec(d.image_docs, p.image_docs);
  return p;
}

}  // namespace entail::synthetic
