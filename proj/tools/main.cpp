#include <iostream>

#include "kleinian/cli.hpp"

int main(int argc, char** argv) { return kleinian::cli::run(argc, argv, std::cout, std::cerr); }
