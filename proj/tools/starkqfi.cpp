#include "starkqfi/cli.hpp"

int main(int argc, char** argv) { return starkqfi::cli::main(argc, argv); }
