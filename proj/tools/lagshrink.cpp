#include <lagshrink/cli.hpp>

int main(int argc, char **argv) { return lagshrink::cli::run(argc, argv); }
