#include <iostream>

#include "fracporo_cli/cli.hpp"

int main(int argc, char** argv) { return fracporo::cli_main(argc, argv, std::cout, std::cerr); }
