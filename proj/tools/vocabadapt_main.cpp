#include <iostream>
#include <string>
#include <vector>

#include "vocabadapt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vocabadapt::run_cli(args, std::cin, std::cout, std::cerr);
}
