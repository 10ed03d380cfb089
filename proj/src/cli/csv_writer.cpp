#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>

#include "esr/cli.hpp"
#include "esr/version.hpp"

namespace esr::cli {

std::string csv_header(const RunConfig& cfg) {
  std::string out = fmt::format("# esr {}\n# command: {}\n", kVersion, cfg.command);
  for (const auto& [k, v] : cfg.entries) out += fmt::format("# {}={}\n", k, v);
  return out;
}

std::string timestamp_line() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return fmt::format("# timestamp: {}\n", buf);
}

void write_csv_file(const std::filesystem::path& path, const RunConfig& cfg, const std::string& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << csv_header(cfg) << timestamp_line() << body;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace esr::cli
