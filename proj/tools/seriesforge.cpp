#include <iostream>

#include "seriesforge/cli/commands.hpp"

int main(int argc, char** argv) { return seriesforge::cli::run_main(argc, argv, std::cout, std::cerr); }
