#ifndef TAGPARSE_CLI_H_
#define TAGPARSE_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace tagparse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one subcommand. `args` excludes the program name. Reports go to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tagparse

#endif  // TAGPARSE_CLI_H_
