#include <iostream>

#include "bcrecon/commands.hpp"

int main(int argc, char** argv) { return bcrecon::run_cli(argc, argv, std::cout, std::cerr); }
