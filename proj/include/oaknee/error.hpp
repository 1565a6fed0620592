#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oaknee {

/// Base of every error raised by the toolkit. `kind()` names the error
/// category so callers (and the CLI exit-code mapping) can branch on it
/// without a cascade of catch clauses.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define OAKNEE_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

OAKNEE_DEFINE_ERROR(InvalidArgument)
OAKNEE_DEFINE_ERROR(InvalidLandmarks)
OAKNEE_DEFINE_ERROR(IndexError)
OAKNEE_DEFINE_ERROR(DegenerateGeometry)
OAKNEE_DEFINE_ERROR(OutOfSupport)
OAKNEE_DEFINE_ERROR(InvalidResample)
OAKNEE_DEFINE_ERROR(RoiOutOfBounds)
OAKNEE_DEFINE_ERROR(PatchTooSmall)
OAKNEE_DEFINE_ERROR(InsufficientScales)
OAKNEE_DEFINE_ERROR(ShapeError)
OAKNEE_DEFINE_ERROR(BatchTooSmall)
OAKNEE_DEFINE_ERROR(EmptyDataset)
OAKNEE_DEFINE_ERROR(DegenerateLabels)
OAKNEE_DEFINE_ERROR(Unsupported)
OAKNEE_DEFINE_ERROR(IoError)
OAKNEE_DEFINE_ERROR(ManifestError)
OAKNEE_DEFINE_ERROR(CheckpointError)

#undef OAKNEE_DEFINE_ERROR

/// Malformed input file. Always carries the offending file and a location
/// (line number for text formats, byte offset for binary ones).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t location, const std::string& message)
      : Error("ParseError", source + ":" + std::to_string(location) + ": " + message),
        source_(source),
        location_(location) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t location() const noexcept { return location_; }

 private:
  std::string source_;
  std::size_t location_;
};

}  // namespace oaknee
