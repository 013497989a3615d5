#include <vector>

#include "pemsim/commands.hpp"

int main(int argc, char** argv) {
    return pemsim::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
