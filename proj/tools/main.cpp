#include <iostream>
#include <string>
#include <vector>

#include "se3diffreg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return se3diffreg::run_cli(args, std::cout, std::cerr);
}
