#include <iostream>

#include "sadf/cli.hpp"

int main(int argc, char** argv) { return sadf::run_cli(argc, argv, std::cout, std::cerr); }
