#include "cli.hpp"

int main(int argc, char** argv) { return probekit::cli::run_cli(argc, argv); }
