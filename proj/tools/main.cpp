#include <vector>

#include "portlab/cli.hpp"

int main(int argc, char** argv) {
  return portlab::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
