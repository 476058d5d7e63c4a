#include <iostream>

#include "matteforge/cli.hpp"

int main(int argc, char** argv) {
    return matteforge::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
