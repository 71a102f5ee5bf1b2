#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return cantor_dioph::cli::dispatch(argc, argv, std::cout, std::cerr); }
