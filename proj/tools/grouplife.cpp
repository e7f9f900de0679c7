#include <iostream>

#include "grouplife/cli.hpp"

int main(int argc, char** argv) {
  return grouplife::run_cli(argc, argv, std::cout, std::cerr);
}
