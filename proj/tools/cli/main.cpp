#include "twinlab/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return twinlab::run_cli(argc, argv, std::cout, std::cerr);
}
