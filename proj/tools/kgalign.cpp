#include <iostream>

#include "kgalign/cli.hpp"

int main(int argc, char** argv) {
  return kgalign::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
