#include <iostream>

#include "flexti2v/app/runner.hpp"

int main(int argc, char** argv) {
    return flexti2v::app::main_cli(argc, argv, std::cout, std::cerr);
}
