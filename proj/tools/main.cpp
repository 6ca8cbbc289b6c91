#include <vector>

#include "steadyks/cli.hpp"

int main(int argc, char** argv) {
  return steadyks::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
