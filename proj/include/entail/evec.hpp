#pragma once
// EVEC embedding store. Little-endian:
//
//   "EVEC" | u16 version=1 | u16 reserved=0 | u32 dim | u64 count
//   count x ( u16 id_byte_length | id UTF-8 bytes | dim x f32 )

#include <cmath>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "entail/binary_io.hpp"
#include "entail/error.hpp"

namespace entail {

inline constexpr std::string_view kEvecMagic = "EVEC";
inline constexpr std::uint16_t kEvecVersion = 1;

// Ordered id -> vector map; every vector has the same dim. Values are kept at
// the 32-bit storage precision.
class EvecStore {
 public:
  explicit EvecStore(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) throw Error("EVEC store dim must be positive");
    if (dim_ > std::numeric_limits<std::uint32_t>::max()) throw Error("EVEC store dim too large");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  bool contains(const std::string& id) const { return index_.contains(id); }

  std::span<const float> at(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw MissingIdsError("EVEC store", {id});
    return row(it->second);
  }

  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(values_).subspan(i * dim_, dim_);
  }

  void add(std::string id, std::span<const float> values) {
    if (values.size() != dim_) throw DimensionError("EVEC entry '" + id + "'", dim_, values.size());
    if (id.empty()) throw Error("EVEC ids must be non-empty");
    if (id.size() > std::numeric_limits<std::uint16_t>::max()) throw Error("EVEC id longer than 65535 bytes");
    for (float v : values)
      if (!std::isfinite(v)) throw Error("EVEC entry '" + id + "' has a non-finite value");
    if (index_.contains(id)) throw Error("duplicate EVEC id '" + id + "'");
    index_.emplace(id, ids_.size());
    ids_.push_back(std::move(id));
    values_.insert(values_.end(), values.begin(), values.end());
  }

  void add(std::string id, std::span<const double> values) {
    std::vector<float> narrowed(values.begin(), values.end());
    add(std::move(id), std::span<const float>(narrowed));
  }

  friend bool operator==(const EvecStore& a, const EvecStore& b) {
    return a.dim_ == b.dim_ && a.ids_ == b.ids_ && a.values_ == b.values_;
  }

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> values_;
};

inline std::string encode_evec(const EvecStore& store) {
  io::ByteWriter w;
  w.bytes(kEvecMagic);
  w.u16(kEvecVersion);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(store.dim()));
  w.u64(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& id = store.ids()[i];
    w.u16(static_cast<std::uint16_t>(id.size()));
    w.bytes(id);
    for (float v : store.row(i)) w.f32(v);
  }
  return std::move(w).take();
}

inline EvecStore decode_evec(std::string_view data) {
  using Kind = FormatError::Kind;
  io::ByteReader r(data, "EVEC");
  if (r.remaining() < kEvecMagic.size() || data.substr(0, kEvecMagic.size()) != kEvecMagic)
    r.fail(Kind::BadMagic, "not an EVEC file", 0);
  r.bytes(kEvecMagic.size(), "magic");
  const std::size_t version_at = r.offset();
  const auto version = r.u16("version");
  if (version != kEvecVersion)
    r.fail(Kind::BadVersion, "unsupported version " + std::to_string(version), version_at);
  const std::size_t reserved_at = r.offset();
  if (r.u16("reserved") != 0) r.fail(Kind::BadValue, "reserved field must be 0", reserved_at);
  const std::size_t dim_at = r.offset();
  const auto dim = r.u32("dim");
  const auto count = r.u64("count");
  if (dim == 0) r.fail(Kind::Inconsistent, "dim is 0", dim_at);

  EvecStore store(dim);
  std::vector<float> buf(dim);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::size_t record_at = r.offset();
    const auto id_len = r.u16("id length");
    std::string id(r.bytes(id_len, "id"));
    if (id.empty()) r.fail(Kind::BadValue, "record " + std::to_string(k) + " has an empty id", record_at);
    if (store.contains(id)) r.fail(Kind::DuplicateId, "duplicate id '" + id + "'", record_at);
    const std::size_t values_at = r.offset();
    for (auto& v : buf) v = r.f32("vector");
    for (float v : buf)
      if (!std::isfinite(v)) r.fail(Kind::BadValue, "non-finite value for id '" + id + "'", values_at);
    store.add(std::move(id), std::span<const float>(buf));
  }
  if (!r.at_end())
    r.fail(Kind::Inconsistent,
           std::to_string(r.remaining()) + " bytes beyond the " + std::to_string(count) +
               " records declared for dim " + std::to_string(dim),
           r.offset());
  return store;
}

inline void write_evec(const EvecStore& store, const std::filesystem::path& path) {
  io::write_file(path, encode_evec(store));
}

inline EvecStore read_evec(const std::filesystem::path& path) {
  try {
    return decode_evec(io::read_file(path));
  } catch (const FormatError& e) {
    throw e.with_context(path.string());
  }
}

}  // namespace entail
