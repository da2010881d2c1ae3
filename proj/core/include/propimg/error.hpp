#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace propimg {

enum class ErrorCode {
  DegenerateBounds,
  NonFiniteInput,
  WindowTooShort,
  InvalidConfig,
  ShapeMismatch,
  MissingLeg,
  MissingColumn,
  InvalidBounds,
  MalformedManifest,
  NonMonotonicTime,
  TooFewRows,
  IoFailure,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  InvalidSpec,
  EmptyInput,
  IndexOutOfRange,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library is reported through this one exception type;
// `code()` identifies the failure class and `what()` names the offending
// field, column or offset.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Thrown by read_pit when the file ends before the declared payload does.
class TruncatedFileError : public Error {
 public:
  TruncatedFileError(std::uint64_t offset, const std::string& detail)
      : Error(ErrorCode::TruncatedFile,
              detail + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace propimg
