#ifndef ARENA_TOOLS_CLI_H_
#define ARENA_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace arena::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitBadInput = 2;

// Runs one arena_cli command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arena::cli

#endif  // ARENA_TOOLS_CLI_H_
