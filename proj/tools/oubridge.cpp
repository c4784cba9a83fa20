#include <iostream>

#include "oubridge/cli.hpp"

int main(int argc, char** argv) { return oubridge::run_cli(argc, argv, std::cout, std::cerr); }
