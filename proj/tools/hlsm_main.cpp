#include "hlsm/io.hpp"

#include <iostream>

int main(int argc, char** argv) { return hlsm::run_cli(argc, argv, std::cout, std::cerr); }
