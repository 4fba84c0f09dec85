#include <iostream>
#include <string>
#include <vector>

#include "vipr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return vipr::cli::run(args, std::cout, std::cerr);
}
