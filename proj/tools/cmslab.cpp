#include <iostream>

#include "cmslab/cli.hpp"

int main(int argc, char** argv) {
    return cmslab::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
