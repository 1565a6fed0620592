#include "oaknee/cli/cli.hpp"

int main(int argc, char** argv) { return oaknee::cli::run(argc, argv); }
