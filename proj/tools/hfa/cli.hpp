#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hfa::cli {

enum ExitCode : int { ok = 0, runtime_failure = 1, usage_error = 2 };

/// Parses argv and runs one subcommand. Warnings and errors go to `err`;
/// `out` only receives help text.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience for tests: args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfa::cli
