#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msglass {

/// Command-line driver behind the `msglass` binary. `args` excludes the
/// program name. Returns the process exit code: 0 success, 2 invalid input,
/// 3 numerical failure, 4 statistical verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace msglass
