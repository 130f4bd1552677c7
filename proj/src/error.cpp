#include "sandhi/error.hpp"

namespace sandhi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCodePoint: return "UnknownCodePoint";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::InvalidSequence: return "InvalidSequence";
    case ErrorCode::EmptyWord: return "EmptyWord";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EncodingError: return "EncodingError";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::WindowLength: return "WindowLength";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::VocabMiss: return "VocabMiss";
    case ErrorCode::MalformedDecode: return "MalformedDecode";
    case ErrorCode::NoSeparator: return "NoSeparator";
    case ErrorCode::WordTooShort: return "WordTooShort";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::NoRule: return "NoRule";
    case ErrorCode::InsufficientCoverage: return "InsufficientCoverage";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::size_t position)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      position_(position) {}

}  // namespace sandhi
