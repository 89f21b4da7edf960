#include <string>
#include <vector>

#include "lgn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lgn::cli::run(args);
}
