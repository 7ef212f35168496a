#include <iostream>

#include "sccs/cli_io.hpp"

int main(int argc, char** argv) { return sccs::cli::run_cli(argc, argv, std::cout, std::cerr); }
