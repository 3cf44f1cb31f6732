#include "invrig_cli/commands.hpp"

int main(int argc, char** argv) { return invrig::cli::run(argc, argv); }
