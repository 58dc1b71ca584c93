#include <iostream>

#include "tagparse/cli.h"

int main(int argc, char** argv) {
  return tagparse::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
