// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace dkt::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitNumeric = 1,
  kExitUsage = 2,
  kExitFormat = 3,
};

/// Parses argv, runs one subcommand and maps failures to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dkt::cli
