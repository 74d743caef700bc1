#include <iostream>

#include "chatmpc/cli/cli.hpp"

int main(int argc, char** argv) { return chatmpc::cli::run_cli(argc, argv, std::cout, std::cerr); }
