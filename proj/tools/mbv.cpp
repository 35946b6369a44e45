#include <iostream>
#include <string>
#include <vector>

#include "mbv/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return mbv::cli::run(args, std::cout, std::cerr);
}
