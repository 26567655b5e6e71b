// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "dkt/commands.hpp"

int main(int argc, char** argv) { return dkt::cli::run_cli(argc, argv, std::cout, std::cerr); }
