#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecx {

enum class ErrorCode {
  // dataset
  MissingColumn,
  UnexpectedColumn,
  UnknownLevel,
  DuplicateId,
  EmptyFile,
  MalformedRow,
  InvalidNumber,
  InvalidTarget,
  InvalidSchema,
  ZeroVariance,
  DegenerateClass,
  // glm
  DidNotConverge,
  PerfectSeparation,
  SingleClass,
  DuplicateFeature,
  MissingFeature,
  // ranking / contrast
  InvalidK,
  UnknownItem,
  InvalidPolicy,
  // narrate
  MissingLabel,
  // service / io
  InvalidRecord,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for every pipeline failure; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ecx
