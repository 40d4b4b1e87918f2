#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace floodrisk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line (args[0] is the program name). Returns 0 on
/// success, 1 on usage errors and 2 on data errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default value of `--flag` on `subcommand`, as printed by --help; empty
/// when the flag has no default.
std::string flag_default(const std::string& subcommand, const std::string& flag);

/// Subcommand names in the order they appear in --help.
std::vector<std::string> subcommands();

} // namespace floodrisk::cli
