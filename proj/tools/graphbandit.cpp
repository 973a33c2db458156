#include "graphbandit/cli.hpp"

int main(int argc, char** argv) { return graphbandit::cli_main(argc, argv); }
