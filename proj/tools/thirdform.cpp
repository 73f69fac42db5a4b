#include <iostream>

#include "thirdform/cli.hpp"

int main(int argc, char** argv) { return thirdform::run_cli(argc, argv, std::cout, std::cerr); }
