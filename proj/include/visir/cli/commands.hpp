// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

#include "visir/cli/run_config.hpp"

namespace visir::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitDivergence = 4,
  kExitCheckpointMismatch = 5,
};

int cmd_build_data(const RunConfig& config, std::ostream& out);
int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_reconstruct(const RunConfig& config, std::ostream& out);

/// Full command line entry point; maps library exceptions to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace visir::cli
