#include <iostream>
#include <string>
#include <vector>

#include "psh/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psh::run_cli(args, std::cout, std::cerr);
}
