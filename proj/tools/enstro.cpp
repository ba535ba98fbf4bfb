#include <iostream>

#include "enstro/cli.hpp"

int main(int argc, char** argv) { return enstro::cli::run(argc, argv, std::cout, std::cerr); }
