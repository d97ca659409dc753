#include <iostream>
#include <string>
#include <vector>

#include "jcent/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return jcent::cli::run(args, std::cout, std::cerr);
}
