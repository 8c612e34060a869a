#include <iostream>
#include <string>
#include <vector>

#include "hotelwatt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hotelwatt::cli::run(args, std::cout, std::cerr);
}
