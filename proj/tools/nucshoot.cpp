#include "nucshoot/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return nucshoot::cli::run(argc, argv, std::cout, std::cerr); }
