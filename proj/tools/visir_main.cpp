// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "visir/cli/commands.hpp"

int main(int argc, char** argv) { return visir::cli::run_cli(argc, argv, std::cout, std::cerr); }
