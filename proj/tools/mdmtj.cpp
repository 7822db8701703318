#include <mdmtj/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
    return mdmtj::cli::run(argc, argv, std::cout, std::cerr);
}
