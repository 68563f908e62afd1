#include "cli.hpp"

int main(int argc, char** argv) { return polysplit::cli::dispatch(argc, argv); }
