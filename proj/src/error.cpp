#include "ngame/error.hpp"

namespace ngame {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::ContractViolation: return "contract-violation";
    case ErrorCode::ResourceLimit: return "resource-limit";
    case ErrorCode::InfeasibleScenario: return "infeasible-scenario";
    case ErrorCode::Stiffness: return "stiffness";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::SchemaMismatch: return "schema-mismatch";
  }
  return "unknown";
}

}  // namespace ngame
