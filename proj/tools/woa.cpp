#include <cstdio>
#include <string>
#include <vector>

#include "woa/cli_io.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr,
                     "usage: woa <solve|refine|verify|simulate|oracle> <problem-file>\n"
                     "           [--out DIR] [--seed N] [--tol X] [--levels K]\n"
                     "           [--paths N] [--result FILE] [--timings] [--plots]\n");
        return 2;
    }
    const std::string command = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    return woa::run(command, args);
}
