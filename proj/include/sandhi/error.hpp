#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sandhi {

enum class ErrorCode {
  // text / codec
  UnknownCodePoint,
  UnknownToken,
  InvalidSequence,
  EmptyWord,
  // corpus
  IoError,
  EncodingError,
  EmptyDataset,
  WindowMismatch,
  WindowLength,
  // network
  DimensionMismatch,
  EmptySequence,
  LengthMismatch,
  VocabMiss,
  MalformedDecode,
  NoSeparator,
  WordTooShort,
  // checkpoints
  BadMagic,
  VersionMismatch,
  ChecksumMismatch,
  KindMismatch,
  // oracle
  NoRule,
  InsufficientCoverage,
  // configuration
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` carries the taxonomy and
/// `position()` the offending index for codec errors (npos otherwise).
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorCode code, const std::string& message, std::size_t position = npos);

  ErrorCode code() const noexcept { return code_; }
  std::size_t position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::size_t position_;
};

}  // namespace sandhi
