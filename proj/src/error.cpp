#include "vtmatch/error.hpp"

namespace vtmatch {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kTooFewVertices: return "TooFewVertices";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kUnknownVertex: return "UnknownVertex";
    case ErrorCode::kAlreadyRemoved: return "AlreadyRemoved";
    case ErrorCode::kVertexAlive: return "VertexAlive";
    case ErrorCode::kInvalidGroupCount: return "InvalidGroupCount";
    case ErrorCode::kDegenerateResidual: return "DegenerateResidual";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace vtmatch
