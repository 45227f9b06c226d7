#include <iostream>

#include "svcindex/cli.hpp"

int main(int argc, char** argv) { return svcindex::cli_main(argc, argv, std::cout, std::cerr); }
