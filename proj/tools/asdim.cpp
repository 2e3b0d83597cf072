#include <iostream>

#include "asdim_cli.hpp"

int main(int argc, char** argv) { return asdim::cli::run(argc, argv, std::cout, std::cerr); }
