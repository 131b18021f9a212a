// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>

namespace dab::harness {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      // bad flags, config or settings
  kExitData = 2,       // unreadable or inconsistent input data
  kExitInvariant = 3,  // an internal check failed
};

/// Entry point of dab-harness. Progress goes to `out`; failures go to
/// `err` as one JSON object per line:
///   {"error":"data","message":"...","exit_code":2}
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dab::harness
