#include <iostream>

#include "treeflow/cli.hpp"

int main(int argc, char** argv) { return treeflow::run_cli(argc, argv, std::cout, std::cerr); }
