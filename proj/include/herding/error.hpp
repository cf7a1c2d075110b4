#pragma once

#include <stdexcept>
#include <string>

namespace herding {

enum class ErrorCode {
  CountMismatch,
  NonFiniteState,
  SamePairHerder,
  NumericalFailure,
  ConfigError,
  IoError,
  EmptyLog,
};

const char* to_string(ErrorCode code);

class HerdingError : public std::runtime_error {
 public:
  HerdingError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace herding
