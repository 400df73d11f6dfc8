#pragma once

#include <stdexcept>
#include <string>

namespace ngame {

enum class ErrorCode {
  InvalidState = 1,
  ContractViolation,
  ResourceLimit,
  InfeasibleScenario,
  Stiffness,
  Config,
  Io,
  SchemaMismatch,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; translated to C error codes at
/// the library boundary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const char* what) {
  if (!cond) fail(ErrorCode::ContractViolation, what);
}

}  // namespace ngame
