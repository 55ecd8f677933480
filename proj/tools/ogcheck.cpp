#include <iostream>

#include "og/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return og::cli_main(args, std::cout, std::cerr);
}
