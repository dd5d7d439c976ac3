#include "hullcert/cli.hpp"

int main(int argc, char ** argv) { return hullcert::cli::run(argc, argv); }
