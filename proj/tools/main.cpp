#include <string>
#include <vector>

#include "tomo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tomo::run_cli(args);
}
