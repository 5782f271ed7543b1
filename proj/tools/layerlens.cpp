#include <iostream>

#include "layerlens/cli/commands.hpp"

int main(int argc, char** argv) { return layerlens::cli::run(argc, argv, std::cerr); }
