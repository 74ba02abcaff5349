#include <iostream>

#include "byrdtd/cli.hpp"

int main(int argc, char** argv) { return byrdtd::cli_main(argc, argv, std::cout, std::cerr); }
