#include <iostream>

#include "glq/cli.hpp"

int main(int argc, char** argv) { return glq::cli::run(argc, argv, std::cout, std::cerr); }
