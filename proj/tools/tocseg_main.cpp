#include "tocseg/cli.hpp"

int main(int argc, char** argv) { return tocseg::cli::main(argc, argv); }
