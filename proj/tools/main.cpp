#include <iostream>

#include "aggrum/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return aggrum::run_cli(args, std::cout, std::cerr);
}
