#include "satcrb/cli.hpp"

int main(int argc, char** argv) { return satcrb::cli::run_cli(argc, argv); }
