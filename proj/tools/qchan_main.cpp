#include "qchan/cli.hpp"

#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qchan::cli_run(std::move(args), std::cin, std::cout, std::cerr);
}
