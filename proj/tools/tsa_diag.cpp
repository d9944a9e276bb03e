#include "tsa/cli.hpp"

int main(int argc, char** argv) { return tsa::cli_main(argc, argv); }
