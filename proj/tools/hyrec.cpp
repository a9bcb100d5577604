#include "hyrec/cli/commands.hpp"

int main(int argc, char** argv) { return hyrec::cli::run(argc, argv); }
