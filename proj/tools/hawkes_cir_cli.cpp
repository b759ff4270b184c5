#include <iostream>
#include <string>
#include <vector>

#include "hawkes_cir/harness.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hawkes_cir::harness::run_command(args, std::cout, std::cerr);
}
