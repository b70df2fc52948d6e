#include "cli/run.hpp"

int main(int argc, char** argv) { return beltrami::cli::main_entry(argc, argv); }
