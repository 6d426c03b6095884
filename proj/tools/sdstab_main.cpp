#include <iostream>

#include "sdstab/cli.hpp"

int main(int argc, char** argv) {
  return sdstab::cli::run(argc, argv, std::cout, std::cerr);
}
