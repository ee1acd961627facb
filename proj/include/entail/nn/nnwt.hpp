#pragma once
// NNWT model container. Little-endian:
//
//   "NNWT" | u16 version=1 | u16 layer_count
//   per layer: u32 in_dim | u32 out_dim | u8 activation (0 ReLU, 1 Sigmoid)
//              | f32 dropout_rate | f32 activity_reg
//              | in_dim*out_dim f32 weights (row = input index) | out_dim f32 biases
//
// Parameters are stored at 32-bit precision.

#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "entail/binary_io.hpp"
#include "entail/nn/mlp.hpp"

namespace entail::nn {

inline constexpr std::string_view kNnwtMagic = "NNWT";
inline constexpr std::uint16_t kNnwtVersion = 1;

inline std::string encode_nnwt(const Mlp& model) {
  model.validate();
  if (model.num_layers() > std::numeric_limits<std::uint16_t>::max()) throw Error("too many layers for NNWT");
  io::ByteWriter w;
  w.bytes(kNnwtMagic);
  w.u16(kNnwtVersion);
  w.u16(static_cast<std::uint16_t>(model.num_layers()));
  for (const auto& l : model.layers()) {
    if (l.spec.in_dim > std::numeric_limits<std::uint32_t>::max() ||
        l.spec.out_dim > std::numeric_limits<std::uint32_t>::max())
      throw Error("layer too wide for NNWT");
    w.u32(static_cast<std::uint32_t>(l.spec.in_dim));
    w.u32(static_cast<std::uint32_t>(l.spec.out_dim));
    w.u8(static_cast<std::uint8_t>(l.spec.activation));
    w.f32(static_cast<float>(l.spec.dropout_rate));
    w.f32(static_cast<float>(l.spec.activity_reg));
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.f32(static_cast<float>(l.weights(r, c)));
    for (Eigen::Index c = 0; c < l.bias.size(); ++c) w.f32(static_cast<float>(l.bias(c)));
  }
  return std::move(w).take();
}

inline Mlp decode_nnwt(std::string_view data) {
  using Kind = FormatError::Kind;
  io::ByteReader r(data, "NNWT");
  if (r.remaining() < kNnwtMagic.size() || data.substr(0, kNnwtMagic.size()) != kNnwtMagic)
    r.fail(Kind::BadMagic, "not an NNWT file", 0);
  r.bytes(kNnwtMagic.size(), "magic");
  const std::size_t version_at = r.offset();
  const auto version = r.u16("version");
  if (version != kNnwtVersion)
    r.fail(Kind::BadVersion, "unsupported version " + std::to_string(version), version_at);
  const std::size_t count_at = r.offset();
  const auto layer_count = r.u16("layer_count");
  if (layer_count == 0) r.fail(Kind::Inconsistent, "layer_count is 0", count_at);

  std::vector<Layer> layers;
  layers.reserve(layer_count);
  for (std::uint16_t k = 0; k < layer_count; ++k) {
    const std::size_t header_at = r.offset();
    LayerSpec spec;
    spec.in_dim = r.u32("in_dim");
    spec.out_dim = r.u32("out_dim");
    const std::size_t act_at = r.offset();
    const auto act = r.u8("activation");
    if (act > 1) r.fail(Kind::BadValue, "unknown activation code " + std::to_string(act), act_at);
    spec.activation = static_cast<Activation>(act);
    spec.dropout_rate = r.f32("dropout_rate");
    spec.activity_reg = r.f32("activity_reg_coeff");
    try {
      spec.validate();
    } catch (const Error& e) {
      r.fail(Kind::BadValue, "layer " + std::to_string(k) + ": " + e.what(), header_at);
    }
    if (!layers.empty() && layers.back().spec.out_dim != spec.in_dim)
      r.fail(Kind::Inconsistent, "layer " + std::to_string(k) + " in_dim does not chain", header_at);
    const auto n_weights = static_cast<std::uint64_t>(spec.in_dim) * spec.out_dim;
    if (r.remaining() / 4 < n_weights + spec.out_dim)
      r.fail(Kind::Truncated,
             "truncated in layer " + std::to_string(k) + " parameters (need " +
                 std::to_string((n_weights + spec.out_dim) * 4) + " bytes, " +
                 std::to_string(r.remaining()) + " left)",
             r.offset());

    Layer l{spec, Matrix(spec.in_dim, spec.out_dim), Vector(static_cast<Eigen::Index>(spec.out_dim))};
    const std::size_t params_at = r.offset();
    for (Eigen::Index i = 0; i < l.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < l.weights.cols(); ++j) l.weights(i, j) = r.f32("weight");
    for (Eigen::Index j = 0; j < l.bias.size(); ++j) l.bias(j) = r.f32("bias");
    if (!l.weights.allFinite() || !l.bias.allFinite())
      r.fail(Kind::BadValue, "layer " + std::to_string(k) + " has non-finite parameters", params_at);
    layers.push_back(std::move(l));
  }
  if (!r.at_end())
    r.fail(Kind::Inconsistent, std::to_string(r.remaining()) + " trailing bytes after last layer", r.offset());
  const auto& last = layers.back().spec;
  if (last.out_dim != kOutputs || last.activation != Activation::Sigmoid)
    r.fail(Kind::Inconsistent, "final layer must have 3 sigmoid outputs", r.offset());
  return Mlp(std::move(layers));
}

inline void save_model(const Mlp& model, const std::filesystem::path& path) {
  io::write_file(path, encode_nnwt(model));
}

inline Mlp load_model(const std::filesystem::path& path) {
  try {
    return decode_nnwt(io::read_file(path));
  } catch (const FormatError& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace entail::nn
