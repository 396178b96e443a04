#include "ecx/error.hpp"

namespace ecx {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnexpectedColumn: return "UnexpectedColumn";
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InvalidNumber: return "InvalidNumber";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::DidNotConverge: return "DidNotConverge";
    case ErrorCode::PerfectSeparation: return "PerfectSeparation";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::DuplicateFeature: return "DuplicateFeature";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace ecx
