#include <iostream>

#include "gasket_forge/cli.hpp"

int main(int argc, char** argv) { return gf::run_cli(argc, argv, std::cout, std::cerr); }
