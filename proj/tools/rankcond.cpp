#include <iostream>

#include "rankcond/cli.hpp"

int main(int argc, char** argv) { return rankcond::cli::main(argc, argv, std::cout, std::cerr); }
