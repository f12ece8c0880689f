#include "polyqc/pipeline/cli.hpp"

int main(int argc, char** argv) { return polyqc::run_cli(argc, argv); }
