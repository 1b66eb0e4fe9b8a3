#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freqsynth::cli {

// Runs one subcommand. `args` excludes the program name.
// Returns 0 on success, 1 on a runtime failure, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace freqsynth::cli
