#include <iostream>

#include "matte/cli/commands.hpp"

int main(int argc, char** argv) {
  return matte::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
