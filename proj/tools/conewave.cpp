#include <string>
#include <vector>

#include "conewave/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return conewave::cli_main(args);
}
