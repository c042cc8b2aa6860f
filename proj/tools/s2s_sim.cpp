#include "s2s/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return s2s::cli::run_cli(args);
}
