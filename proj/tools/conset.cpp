#include "conset/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return conset::run_cli(argc, argv, std::cout, std::cerr); }
