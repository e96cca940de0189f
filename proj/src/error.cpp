#include "fatgate/error.hpp"

namespace fatgate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::Ambiguous: return "Ambiguous";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::Internal: return "Internal";
    case ErrorCode::NonFiniteNumber: return "NonFiniteNumber";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Internal";
}

ErrorCode wire_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
    case ErrorCode::NoMatch:
    case ErrorCode::Ambiguous:
    case ErrorCode::BadIndex:
    case ErrorCode::MalformedInput:
    case ErrorCode::Internal:
      return code;
    case ErrorCode::NonFiniteNumber:
      return ErrorCode::MalformedInput;
    default:
      return ErrorCode::Internal;
  }
}

}  // namespace fatgate
