#pragma once
// Little-endian primitive encoding shared by the EVEC and NNWT containers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "entail/error.hpp"

namespace entail::io {

class ByteWriter {
 public:
  void bytes(std::string_view raw) { buf_.append(raw); }

  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void u64(std::uint64_t v) { put_le(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  const std::string& buffer() const noexcept { return buf_; }
  std::string take() && { return std::move(buf_); }

 private:
  void put_le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
  }

  std::string buf_;
};

// Bounds-checked cursor. Every read past the end raises a Truncated
// FormatError carrying the offset where the missing field starts.
class ByteReader {
 public:
  ByteReader(std::string_view data, std::string format_name)
      : data_(data), format_(std::move(format_name)) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == data_.size(); }

  std::string_view bytes(std::size_t n, const char* field) {
    require(n, field);
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint8_t u8(const char* field) { return static_cast<std::uint8_t>(get_le(1, field)); }
  std::uint16_t u16(const char* field) { return static_cast<std::uint16_t>(get_le(2, field)); }
  std::uint32_t u32(const char* field) { return static_cast<std::uint32_t>(get_le(4, field)); }
  std::uint64_t u64(const char* field) { return get_le(8, field); }
  float f32(const char* field) { return std::bit_cast<float>(u32(field)); }

  [[noreturn]] void fail(FormatError::Kind kind, const std::string& what, std::size_t at) const {
    throw FormatError(kind, at, format_ + ": " + what);
  }

 private:
  void require(std::size_t n, const char* field) const {
    if (remaining() < n) {
      fail(FormatError::Kind::Truncated,
           std::string("truncated while reading ") + field + " (need " + std::to_string(n) +
               " bytes, " + std::to_string(remaining()) + " left)",
           pos_);
    }
  }

  std::uint64_t get_le(int n, const char* field) {
    require(static_cast<std::size_t>(n), field);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::string_view data_;
  std::string format_;
  std::size_t pos_ = 0;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace entail::io
