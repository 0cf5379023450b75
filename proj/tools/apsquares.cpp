#include "apsq/cli.hpp"

int main(int argc, char** argv) { return apsq::cli::run(argc, argv); }
