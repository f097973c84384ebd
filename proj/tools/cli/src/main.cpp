#include <iostream>
#include <string>
#include <vector>

#include "gospace_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gospace::cli::run(args, std::cout, std::cerr);
}
