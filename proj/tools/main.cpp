#include <iostream>

#include "ih/cli.hpp"

int main(int argc, char** argv) { return ih::cli::main(argc, argv, std::cout, std::cerr); }
