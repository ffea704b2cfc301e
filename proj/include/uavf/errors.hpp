#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uavf {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid value supplied to a constructor or operation.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Evidence file could not be read.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Binary stream violates the expected on-disk format. Carries the byte
/// offset where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_ = 0;
};

/// Structured document (JSON) failed to parse or misses required fields.
/// Carries a field path such as "mission.items[3].command".
class DocumentError : public Error {
 public:
  DocumentError(const std::string& what, std::string field_path)
      : Error(what + " at " + field_path), field_path_(std::move(field_path)) {}
  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace uavf
