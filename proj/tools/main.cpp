#include <iostream>

#include "cascade_kde/cli.hpp"

int main(int argc, char** argv) {
    return cascade_kde::cli_dispatch(argc, argv, std::cout, std::cerr);
}
