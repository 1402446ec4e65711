#include <iostream>
#include <string>
#include <vector>

#include "hydra/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return hydra::cli::run(args, std::cout, std::cerr);
}
