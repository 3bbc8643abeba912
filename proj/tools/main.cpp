#include <iostream>

#include "matukuma/cli.hpp"

int main(int argc, char** argv) { return matukuma::cli::run(argc, argv, std::cout, std::cerr); }
