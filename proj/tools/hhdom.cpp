#include <iostream>

#include "hhdom/cli.hpp"

int main(int argc, char** argv) {
  return hhdom::cli::main(argc, argv, std::cout, std::cerr);
}
