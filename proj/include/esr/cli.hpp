#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace esr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Malformed config file or unknown key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key=value file; '#' starts a comment line. Keys are option names
/// without the leading dashes.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

/// Resolved settings of one run, written at the top of every CSV.
struct RunConfig {
  std::string command;
  std::vector<std::pair<std::string, std::string>> entries;
};

/// "# esr <version>" / "# command: ..." / "# key=value" lines.
std::string csv_header(const RunConfig& cfg);
/// The timestamp comment kept on its own line so reruns can be diffed without it.
std::string timestamp_line();
/// Header, timestamp and body; creates parent directories.
void write_csv_file(const std::filesystem::path& path, const RunConfig& cfg, const std::string& body);

/// Safe file-name fragment for a series label ("1/4a" -> "1_4a").
std::string file_label(const std::string& label);

/// Entry point behind the `esr` binary. Returns the exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace esr::cli
