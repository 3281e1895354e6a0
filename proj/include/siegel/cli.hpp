#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace siegel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitComputation = 3;
inline constexpr int kExitSelftest = 4;

// Runs the siegel-lab command line. args excludes the program name. Reports
// go to out unless --out names a file; diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Reads a key=value file. Blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// Parses "1e7" or "10000000" as a positive integer; throws ConfigError otherwise.
std::uint64_t parse_count(const std::string& text);

}  // namespace siegel
