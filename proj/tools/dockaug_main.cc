#include <iostream>
#include <string>
#include <vector>

#include "dockaug/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dockaug::RunCli(args, std::cout, std::cerr);
}
