#include <iostream>

#include "fcfv/cli.hpp"

int main(int argc, char** argv) { return fcfv::cli_main(argc, argv, std::cout, std::cerr); }
