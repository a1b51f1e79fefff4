#include "dpnp/io/cli.hpp"

int main(int argc, char** argv) { return dpnp::io::cli_run(argc, argv); }
