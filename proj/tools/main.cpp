#include <string>
#include <vector>

#include "coopq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return coopq::run_cli(args);
}
