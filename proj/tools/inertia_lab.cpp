#include "inertia/cli.hpp"

int main(int argc, char** argv) { return inertia::cli::run_cli(argc, argv); }
