#include <iostream>
#include <string>
#include <vector>

#include "trucedyn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trucedyn::cli::run(std::move(args), std::cout, std::cerr);
}
