#include "cventropic/cli.hpp"

int main(int argc, char** argv) { return cventropic::cli::main_entry(argc, argv); }
