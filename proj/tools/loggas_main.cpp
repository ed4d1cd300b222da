#include "loggas/cli.hpp"

int main(int argc, char** argv) { return loggas::run_cli(argc, argv); }
