#include <iostream>
#include <string>
#include <vector>

#include "histscan/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return histscan::run_cli(args, std::cout, std::cerr);
}
