#include "cli.hpp"

int main(int argc, char** argv) { return sosperturb::cli::run_cli(argc, argv); }
