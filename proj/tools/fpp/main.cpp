#include <iostream>

#include "fpp/cli.hpp"

int main(int argc, char** argv) {
  return fpp::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
