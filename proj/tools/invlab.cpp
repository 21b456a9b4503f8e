#include <iostream>

#include "invlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return invlab::run_cli(args, std::cout, std::cerr);
}
