#include <iostream>

#include "zps/cli.hpp"

int main(int argc, char** argv) {
    return zps::run_cli(argc, argv, std::cout, std::cerr);
}
