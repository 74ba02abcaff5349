#pragma once

#include <stdexcept>
#include <string>

namespace byrdtd {

enum class ErrorCode {
  NotErgodic,
  SingularSystem,
  NotNegativeDefinite,
  InvalidModel,
  InvalidSpec,
  UnknownAgent,
  InvalidTrim,
  UnknownPreset,
  BudgetExceeded,
  TooFewNeighbors,
  BracketingFailed,
  NoHonestAgents,
  TooShort,
  NonFiniteParameter,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotErgodic: return "NotErgodic";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotNegativeDefinite: return "NotNegativeDefinite";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::InvalidTrim: return "InvalidTrim";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TooFewNeighbors: return "TooFewNeighbors";
    case ErrorCode::BracketingFailed: return "BracketingFailed";
    case ErrorCode::NoHonestAgents: return "NoHonestAgents";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace byrdtd
