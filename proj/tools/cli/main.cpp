#include "cli.hpp"

int main(int argc, char** argv) { return hconv::cli::run_cli(argc, argv); }
