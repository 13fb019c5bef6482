#include <iostream>
#include <string>
#include <vector>

#include "cdc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cdc::run_cli(args, std::cin, std::cout, std::cerr);
}
