#include "cuelearn/cli.hpp"

int main(int argc, char** argv) { return cuelearn::cli::run(argc, argv); }
