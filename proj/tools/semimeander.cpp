#include <semimeander/cli.hpp>

int main(int argc, char** argv) { return semimeander::cli::run_cli(argc, argv); }
