#include <iostream>

#include "hpboost/cli.hpp"

int main(int argc, char** argv) { return hpboost::cli_main(argc, argv, std::cout, std::cerr); }
