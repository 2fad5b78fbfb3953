#include "ruinlab/cli.hpp"

int main(int argc, char** argv) {
    return ruinlab::cli::main_entry(argc, argv);
}
