#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace entail {

// Base for every data/format/contract failure raised by the library.
// The CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(what + " (expected dim " + std::to_string(expected) + ", got " +
              std::to_string(actual) + ")"),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

// Binary container problems (EVEC / NNWT). `offset` is the byte position at
// which the problem was detected.
class FormatError : public Error {
 public:
  enum class Kind { BadMagic, BadVersion, Truncated, DuplicateId, Inconsistent, BadValue };

  FormatError(Kind kind, std::size_t offset, const std::string& detail)
      : Error(detail + " at byte offset " + std::to_string(offset)),
        kind_(kind),
        offset_(offset),
        detail_(detail) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

  // Same error, message prefixed with e.g. the file name.
  FormatError with_context(const std::string& context) const {
    return FormatError(kind_, offset_, context + ": " + detail_);
  }

 private:
  Kind kind_;
  std::size_t offset_;
  std::string detail_;
};

class ManifestError : public Error {
 public:
  ManifestError(std::size_t line, const std::string& what)
      : Error("manifest line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MissingIdsError : public Error {
 public:
  MissingIdsError(const std::string& where, std::vector<std::string> ids)
      : Error(make_message(where, ids)), ids_(std::move(ids)) {}

  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  static std::string make_message(const std::string& where, const std::vector<std::string>& ids) {
    std::string msg = std::to_string(ids.size()) + " id(s) missing from " + where + ":";
    for (const auto& id : ids) msg += " " + id;
    return msg;
  }

  std::vector<std::string> ids_;
};

}  // namespace entail
