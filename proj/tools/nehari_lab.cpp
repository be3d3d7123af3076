#include "nehari_lab/cli.hpp"

int main(int argc, char** argv) { return nehari_lab::run_cli(argc, argv); }
