#include <string>
#include <vector>

#include "specwave/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return specwave::run_command(std::move(args));
}
