#include "nirisk/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return nirisk::cli::run(argc, argv, std::cout, std::cerr); }
