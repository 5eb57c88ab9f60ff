#include <iostream>

#include "ovsafe/cli.hpp"

int main(int argc, char** argv) { return ovsafe::run_cli(argc, argv, std::cout, std::cerr); }
