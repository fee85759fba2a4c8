#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace ppmaudit::detail {

struct ProcessOutcome {
  bool timed_out = false;
  bool signaled = false;
  int exit_code = -1;  // valid when neither timed out nor signaled
  int signal = 0;
};

// Runs argv[0] (PATH lookup) in its own process group with stdin from
// /dev/null and stdout/stderr redirected to the given files. On timeout the
// whole group is killed. Throws ExecutionError if the program cannot start.
ProcessOutcome run_process(const std::vector<std::string>& argv, const std::filesystem::path& stdout_path,
                           const std::filesystem::path& stderr_path, std::chrono::milliseconds timeout);

// Last `max_bytes` of a file, or "" when it cannot be read.
std::string tail_of(const std::filesystem::path& path, std::size_t max_bytes = 4096);

}  // namespace ppmaudit::detail
