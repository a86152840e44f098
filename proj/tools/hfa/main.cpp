#include <iostream>

#include "hfa/cli.hpp"

int main(int argc, char** argv) { return hfa::cli::run(argc, argv, std::cout, std::cerr); }
