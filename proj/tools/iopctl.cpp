#include <iostream>

#include "iop/cli/commands.hpp"

int main(int argc, char** argv) { return iop::cli::run_cli(argc, argv, std::cout, std::cerr); }
