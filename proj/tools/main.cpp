#include "cli.hpp"

int main(int argc, char** argv) { return gaitopt::cli::run(argc, argv); }
