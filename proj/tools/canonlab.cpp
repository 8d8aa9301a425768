#include <iostream>
#include <string>
#include <vector>

#include "canonlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return canonlab::run_cli(args, std::cout, std::cerr);
}
