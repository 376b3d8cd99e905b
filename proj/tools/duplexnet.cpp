#include "duplexnet/cli.hpp"

int main(int argc, char** argv) { return duplexnet::cli::main(argc, argv); }
