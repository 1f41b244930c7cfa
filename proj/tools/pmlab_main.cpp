#include <string>
#include <vector>

#include "pmlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pmlab::run_command(args);
}
