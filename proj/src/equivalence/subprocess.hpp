#pragma once

#include <string>
#include <vector>

namespace shortcoder::equivalence::detail {

struct ProcessResult {
  bool spawned = false;
  bool timed_out = false;
  int exit_code = -1;  // -1 when killed by a signal
  std::string out;
  std::string err;
  std::string spawn_error;
};

/// Runs argv (PATH lookup), feeds `input` on stdin, collects stdout/stderr.
/// The child is killed once `timeout_ms` elapses.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input,
                          int timeout_ms);

}  // namespace shortcoder::equivalence::detail
