#include "descentlab/cli.hpp"

int main(int argc, char** argv) { return descentlab::cli_main(argc, argv); }
