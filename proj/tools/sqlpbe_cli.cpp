#include "sqlpbe/cli.hpp"

int main(int argc, char** argv) { return sqlpbe::cli::run(argc, argv); }
