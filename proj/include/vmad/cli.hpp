#pragma once

#include <string>
#include <vector>

namespace vmad::cli {

// Parses argv and dispatches to a subcommand; returns the process exit
// code (see vmad::exit_code). Never throws.
int main_entry(int argc, char** argv);

// Same entry point for in-process callers (tests); args exclude argv[0].
int run_command(const std::vector<std::string>& args);

} // namespace vmad::cli
