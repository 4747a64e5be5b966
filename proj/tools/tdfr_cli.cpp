#include <iostream>

#include "tdfr/cli.hpp"

int main(int argc, char** argv) { return tdfr::cli::main_entry(argc, argv, std::cout, std::cerr); }
