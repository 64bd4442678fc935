#include "genlab/cli.hpp"

int main(int argc, char** argv) { return genlab::run_cli(argc, argv); }
