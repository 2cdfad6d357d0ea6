#include "vmad/cli.hpp"

int main(int argc, char** argv) { return vmad::cli::main_entry(argc, argv); }
