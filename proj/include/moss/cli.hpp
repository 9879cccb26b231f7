// Command-line surface. run_cli is the whole program minus process
// boundaries, so tests drive it with string streams.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace moss {

// `args` excludes the program name. Returns the process exit code: 0 on
// success, 1 on user error (one-line diagnostic on err), 2 on solver failure
// (structured JSON on err).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moss
