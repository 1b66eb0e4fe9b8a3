#include "freqsynth/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return freqsynth::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
