#include "ising/harness.hpp"

int main(int argc, char** argv) { return ising::run_cli(argc, argv); }
