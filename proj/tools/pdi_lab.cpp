#include <iostream>
#include <string>
#include <vector>

#include "pdilab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pdilab::cli::run(args, std::cout, std::cerr);
}
