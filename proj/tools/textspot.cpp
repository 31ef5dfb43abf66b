#include <iostream>

#include "textspot/cli.hpp"

int main(int argc, char** argv) { return textspot::cli::main_entry(argc, argv, std::cout, std::cerr); }
