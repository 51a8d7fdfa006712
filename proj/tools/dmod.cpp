#include <iostream>
#include <string>
#include <vector>

#include "dmod/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dmod::cli::dispatch(std::move(args), std::cout, std::cerr);
}
