#include <iostream>

#include "kor/cli.hpp"

int main(int argc, char** argv) { return kor::cli_main(argc, argv, std::cout, std::cerr); }
