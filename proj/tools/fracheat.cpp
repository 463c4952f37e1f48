#include <fracheat/cli.hpp>

int main(int argc, char** argv) { return fracheat::cli::main_entry(argc, argv); }
