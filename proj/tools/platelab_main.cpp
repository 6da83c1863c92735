#include <string>
#include <vector>

#include "platelab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return platelab::run_cli(args);
}
