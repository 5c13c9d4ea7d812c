#pragma once

#include <stdexcept>
#include <string>

namespace gridshock {

enum class ErrorCode {
  DuplicateId,
  UnknownNode,
  UnknownEdge,
  InvalidGeometry,
  BrokenPath,
  OutOfDomain,
  InvalidGrid,
  TooManyRemovals,
  DegenerateDemand,
  HorizonExceeded,
  InvalidK,
  BinMismatch,
  EmptySample,
  InvalidFilter,
  InvalidConfig,
  ParseError,
};

constexpr const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::BrokenPath: return "BrokenPath";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::TooManyRemovals: return "TooManyRemovals";
    case ErrorCode::DegenerateDemand: return "DegenerateDemand";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::InvalidFilter: return "InvalidFilter";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// Single exception type for the whole library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace gridshock
