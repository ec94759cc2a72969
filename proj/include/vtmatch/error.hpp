#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vtmatch {

enum class ErrorCode {
  kInvalidInput,
  kDegenerateInput,
  kEmptySet,
  kTooFewVertices,
  kBudgetExceeded,
  kUnknownVertex,
  kAlreadyRemoved,
  kVertexAlive,
  kInvalidGroupCount,
  kDegenerateResidual,
  kInvalidConfig,
  kIdMismatch,
  kParse,
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Malformed correspondence or scene file. `line` is 1-based, 0 when the
// failure is not tied to a line (e.g. invalid JSON structure).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kParse, message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace vtmatch
