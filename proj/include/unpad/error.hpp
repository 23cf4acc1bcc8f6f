#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unpad {

enum class ErrorCode {
  InvalidArgument,
  LineOutOfRange,
  OffsetExceedsScanLimit,
  EmptyCrop,
  RectOutOfBounds,
  PadTooLarge,
  EmptyRecordSet,
  DegenerateDistribution,
  EmptyManifest,
  Parse,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LineOutOfRange: return "LineOutOfRange";
    case ErrorCode::OffsetExceedsScanLimit: return "OffsetExceedsScanLimit";
    case ErrorCode::EmptyCrop: return "EmptyCrop";
    case ErrorCode::RectOutOfBounds: return "RectOutOfBounds";
    case ErrorCode::PadTooLarge: return "PadTooLarge";
    case ErrorCode::EmptyRecordSet: return "EmptyRecordSet";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::EmptyManifest: return "EmptyManifest";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace unpad
