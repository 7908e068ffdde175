#include <iostream>

#include "apcone/cli.hpp"

int main(int argc, char** argv) { return apcone::run_cli(argc, argv, std::cout, std::cerr); }
