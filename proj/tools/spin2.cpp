#include <spin2/cli.hpp>

#include <iostream>

int main(int argc, char **argv) { return spin2::run_cli(argc, argv, std::cout, std::cerr); }
