#include "clustsig/cli.hpp"

int main(int argc, char** argv) { return clustsig::cli::run(argc, argv); }
