#include <iostream>

#include "z6/cli.hpp"

int main(int argc, char** argv)
{
    return z6::cli::run(argc, argv, std::cout, std::cerr);
}
