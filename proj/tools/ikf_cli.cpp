#include "ikf/cli.hpp"

int main(int argc, char** argv) { return ikf::cli::main(argc, argv); }
