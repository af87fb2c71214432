#include <iostream>

#include "fran/cli.hpp"

int main(int argc, char** argv)
{
    return fran::cli::run_cli(argc, argv, std::cout, std::cerr);
}
