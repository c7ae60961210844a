#include <iostream>
#include <string>
#include <vector>

#include "s2bias/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return s2bias::cli::run(args, std::cout, std::cerr);
}
