#include "iplr/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return iplr::run_cli(argc, argv, std::cout, std::cerr); }
