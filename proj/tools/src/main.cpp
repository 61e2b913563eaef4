#include "bbspline/cli.hpp"

int main(int argc, char** argv) { return bbspline::cli_main(argc, argv); }
