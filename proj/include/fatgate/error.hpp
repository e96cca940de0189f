#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fatgate {

enum class ErrorCode {
  NotFound,
  NoMatch,
  Ambiguous,
  BadIndex,
  MalformedInput,
  Internal,
  // library-level codes; folded onto the wire set by wire_code()
  NonFiniteNumber,
  DuplicateName,
  UnknownType,
  CycleDetected,
  Unsupported,
};

std::string_view to_string(ErrorCode code);

/// The code reported to API callers. Only NotFound, NoMatch, Ambiguous,
/// BadIndex, MalformedInput and Internal ever leave the registry.
ErrorCode wire_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the JSON reader; carries the byte offset of the failure.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, std::size_t offset)
      : Error(code, message + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace fatgate
