#include <iostream>
#include <string>
#include <vector>

#include "cassi/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cassi::cli::run_cli(args, std::cout, std::cerr);
}
