#include "qcensus/cli.hpp"

int main(int argc, char** argv) { return qcensus::cli::main_entry(argc, argv); }
