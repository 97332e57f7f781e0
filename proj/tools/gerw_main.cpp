#include <iostream>

#include "gerw/cli.hpp"

int main(int argc, char** argv) { return gerw::cli::run(argc, argv, std::cout, std::cerr); }
