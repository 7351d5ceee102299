#include "merkki/cli.hpp"

int main(int argc, char** argv) { return merkki::cli::run_cli(argc, argv); }
