#include "tenc/cli.hpp"

int main(int argc, char** argv) { return tenc::cli_main(argc, argv); }
