#include <iostream>
#include <string>
#include <vector>

#include "klmi/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return klmi::cli::run(args, std::cout, std::cerr);
}
