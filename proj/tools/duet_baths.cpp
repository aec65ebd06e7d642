#include "cli.hpp"

int main(int argc, char** argv) { return duet::cli::run(argc, argv); }
