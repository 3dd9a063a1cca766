// errors.hpp -- error codes and the exception type shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace semnet {

enum class ErrorCode {
  // configuration / usage
  InvalidConfig,
  InvalidArgument,
  // data
  EmptyGraph,
  EmptyFile,
  MissingColumns,
  EmptyAfterFiltering,
  UnalignedLayers,
  TooFewLayers,
  Disconnected,
  UnknownPrime,
  NoPrimesPresent,
  NoUsablePairs,
  EmptyMatrix,
  EmptyReport,
  BadGraphFile,
  // numeric
  NoEdges,
  ConvergenceFailure,
};

// Process exit codes: 0 success, 2 validation, 3 data, 4 numeric.
enum class ErrorCategory { validation = 2, data = 3, numeric = 4 };

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
      return ErrorCategory::validation;
    case ErrorCode::NoEdges:
    case ErrorCode::ConvergenceFailure:
      return ErrorCategory::numeric;
    default:
      return ErrorCategory::data;
  }
}

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorCategory category() const { return category_of(code_); }
  int exit_code() const { return static_cast<int>(category()); }

 private:
  ErrorCode code_;
};

}  // namespace semnet
