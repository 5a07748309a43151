#ifndef PPCA_CLI_HPP
#define PPCA_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace ppca {

/// Entry point of the `ppca` command line tool. `args` excludes the program
/// name. Failures print a JSON object {"error", "message"} on `err` and
/// return a nonzero code: 2 for usage errors, 1 for everything else.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppca

#endif  // PPCA_CLI_HPP
