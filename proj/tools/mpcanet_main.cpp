#include <iostream>
#include <string>
#include <vector>

#include "mpcanet/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mpcanet::cli::run_cli(args, std::cout, std::cerr);
}
