#include <iostream>

#include "sisstab/cli.hpp"

int main(int argc, char** argv) { return sisstab::cli::run(argc, argv, std::cout, std::cerr); }
