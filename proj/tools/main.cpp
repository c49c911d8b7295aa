#include <iostream>

#include "biphoton/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return biphoton::cli::run(args, std::cout, std::cerr);
}
