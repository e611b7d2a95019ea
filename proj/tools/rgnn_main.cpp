#include <string>
#include <vector>

#include "rgnn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rgnn::cli_run(args);
}
