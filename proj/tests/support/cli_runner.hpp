#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>

#include <fmt/format.h>

namespace sqlpbe::testing {

/// Runs the CLI binary with `args` and returns its exit status and standard
/// output. Standard error is discarded.
inline std::pair<int, std::string> run_cli(const std::string& args, const std::string& stdin_file = "") {
  std::string cmd = fmt::format("'{}' {} 2>/dev/null", SQLPBE_CLI, args);
  if (!stdin_file.empty()) cmd += fmt::format(" < '{}'", stdin_file);
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe.get())) out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace sqlpbe::testing
