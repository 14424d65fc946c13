#include "cli.hpp"

int main(int argc, char** argv) { return gbda::cli::run(argc, argv); }
