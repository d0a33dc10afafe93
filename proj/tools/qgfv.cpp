#include "qgfv/cli.hpp"

int main(int argc, char** argv) { return qgfv::cli::main(argc, argv); }
