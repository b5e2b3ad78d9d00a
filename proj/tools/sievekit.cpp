#include "sievekit/cli.hpp"

int main(int argc, char** argv) {
  return sievekit::cli::run(argc, argv, std::cout, std::cerr);
}
