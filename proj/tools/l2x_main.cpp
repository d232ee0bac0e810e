#include "l2x/cli.hpp"

int main(int argc, char** argv) { return l2x::cli_main(argc, argv); }
