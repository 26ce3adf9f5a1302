#include <iostream>

#include "hopcap/cli.hpp"

int main(int argc, char** argv) { return hopcap::run_cli(argc, argv, std::cout, std::cerr); }
