#pragma once

namespace sqlpbe::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 1,
  kTimeout = 2,
  kOracleAbort = 3,
};

/// Entry point of the sqlpbe command line tool.
int run(int argc, char** argv);

}  // namespace sqlpbe::cli
