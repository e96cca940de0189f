#include <iostream>

#include "fatgate/cli.hpp"

int main(int argc, char** argv) { return fatgate::cli::run(argc, argv, std::cout, std::cerr); }
