#include <iostream>
#include <string>
#include <vector>

#include "amrgen/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return amrgen::cli::run(args, std::cout, std::cerr);
}
