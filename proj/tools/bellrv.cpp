#include <iostream>
#include <string>
#include <vector>

#include "bellrv/commands.hpp"

int main(int argc, char** argv)
{
    return bellrv::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
