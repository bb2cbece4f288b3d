#include "hillband/cli.hpp"

int main(int argc, char** argv) {
    return hillband::cli::run({argv + 1, argv + argc});
}
