#include <iostream>

#include "morphforest/cli.hpp"

int main(int argc, char** argv) {
  return morphforest::cli::run(argc, argv, std::cout, std::cerr);
}
