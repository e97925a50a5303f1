#include <string>
#include <vector>

#include "shiftfuzz/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return shiftfuzz::run_cli(args);
}
