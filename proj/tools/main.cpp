#include <iostream>

#include "tiedpools/cli.hpp"

int main(int argc, char** argv) { return tiedpools::run_cli(argc, argv, std::cout, std::cerr); }
