#include "cmms/cli.hpp"

int main(int argc, char** argv) { return cmms::cli::main_entry(argc, argv); }
