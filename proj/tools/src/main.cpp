#include <iostream>
#include <string>
#include <vector>

#include "resparse_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return resparse::cli::run(args, std::cout, std::cerr);
}
