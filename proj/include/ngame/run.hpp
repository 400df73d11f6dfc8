#pragma once

#include <string>
#include <vector>

#include "ngame/config.hpp"

namespace ngame {

/// Process exit statuses shared by the CLI and the C API.
enum RunStatus : int {
  kStatusOk = 0,
  kStatusFailure = 1,
  kStatusConfig = 2,
  kStatusInfeasible = 3,
  kStatusNonConverged = 4,
};

int status_for(ErrorCode code);

struct RunResult {
  int status = kStatusOk;  // ok or non-converged; errors are thrown
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  int nonconverged = 0;
  std::string metadata;  // JSON, also written next to the output
};

/// Executes the command in the config and writes its CSV (or scenario JSON)
/// and metadata files.  Partial results are written before a non-converged
/// status is returned.
RunResult run(const RunConfig& config);

/// Default output paths when the config leaves them empty.
std::string output_path(const RunConfig& config);
std::string metadata_path(const RunConfig& config);

}  // namespace ngame
