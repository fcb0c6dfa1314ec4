#include "intent/cli.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    return intent::run_cli(argc, argv, std::cin, std::cout, std::cerr,
                           [](const char* name) { return std::getenv(name); });
}
