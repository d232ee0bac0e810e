#ifndef L2X_CLI_HPP
#define L2X_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace l2x {

/// Entry point of the `l2x` tool. Exit codes: 0 success, 1 invalid input or
/// usage, 2 runtime fault.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace l2x

#endif  // L2X_CLI_HPP
