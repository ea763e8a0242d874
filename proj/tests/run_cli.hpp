#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace mm3::testing {

struct CliResult {
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args` (shell syntax), capturing stdout; stderr is discarded.
inline CliResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" MM3_CLI_PATH "' " + args + " 2>/dev/null";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace mm3::testing
