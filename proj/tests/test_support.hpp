#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

inline std::string fixture(const std::string& name) { return std::string(ARGREFRAME_FIXTURES) + "/" + name; }

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() /
             ("argreframe-" + tag + "-" + std::to_string(rng() % 1000000000ULL));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Runs the CLI with `args`; returns its exit status.
inline int run_cli(const std::string& args, const std::string& log_file = "/dev/null") {
  const std::string cmd = std::string("\"") + ARGREFRAME_CLI + "\" " + args + " >" + log_file + " 2>&1";
  const int raw = std::system(cmd.c_str());
  if (raw == -1) return -1;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace testing_support
