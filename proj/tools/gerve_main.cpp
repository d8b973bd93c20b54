#include "gerve/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gerve::run_cli(argc, argv, std::cout, std::cerr); }
