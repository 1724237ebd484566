#include <iostream>

#include "sheafdiff/cli.hpp"

int main(int argc, char** argv) {
  return sheafdiff::cli_main(argc, argv, std::cout, std::cerr);
}
