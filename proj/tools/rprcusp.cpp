#include "rpr/cli.hpp"

int main(int argc, char** argv) { return rpr::cli::run(argc, argv); }
