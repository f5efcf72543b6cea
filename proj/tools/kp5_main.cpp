#include <iostream>

#include "kp5/config.hpp"

int main(int argc, char** argv) { return kp5::cli::main_entry(argc, argv, std::cout, std::cerr); }
