#include "scooprr/cli.hpp"

int main(int argc, char** argv) { return scooprr::cli_main(argc, argv); }
