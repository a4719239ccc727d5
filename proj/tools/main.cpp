#include <iostream>

#include "wradon/cli.hpp"

int main(int argc, char** argv) { return wradon::run_cli(argc, argv, std::cout, std::cerr); }
