#include <iostream>

#include "torwave/cli.hpp"

int main(int argc, char** argv)
{
    return torwave::cli::run(argc, argv, std::cout, std::cerr);
}
