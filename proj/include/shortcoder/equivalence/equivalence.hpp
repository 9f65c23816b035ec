#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shortcoder::equivalence {

enum class Status { Equivalent, Inequivalent, Inconclusive };
std::string_view to_string(Status s);

struct Verdict {
  Status status = Status::Inconclusive;
  std::string detail;  // diverging test, or the reason a verdict could not be reached

  static Verdict equivalent(std::string detail = {}) { return {Status::Equivalent, std::move(detail)}; }
  static Verdict inequivalent(std::string detail) { return {Status::Inequivalent, std::move(detail)}; }
  static Verdict inconclusive(std::string detail) { return {Status::Inconclusive, std::move(detail)}; }
};

struct RunnerSpec {
  std::vector<std::string> command;  // argv; the request is written to its stdin
  int timeout_ms = 5000;             // per test
  int max_parallel = 4;

  /// Throws std::invalid_argument on an empty command, timeout_ms < 100 or max_parallel < 1.
  void validate() const;

  /// Whitespace-split command line; single and double quotes group words.
  static std::vector<std::string> split_command(std::string_view text);
  /// From SHORTCODER_RUNNER; empty command when unset.
  static RunnerSpec from_env();
};

/// Structural checks only: parse failures and unexplained new names are
/// inequivalent, layout-only differences are equivalent, anything else is
/// inconclusive.
Verdict check_static(std::string_view original, std::string_view simplified);

/// Differential run of both variants through the runner protocol.
Verdict check_dynamic(std::string_view original, std::string_view simplified,
                      const std::vector<std::string>& tests, const RunnerSpec& runner);

// Wire protocol.

struct TestOutcome {
  std::string test;
  std::string status;  // pass | fail | error
  std::optional<std::string> error_class;
};

struct RunResponse {
  std::vector<TestOutcome> results;
  long elapsed_ms = 0;
};

std::string encode_request(std::string_view code, const std::vector<std::string>& tests,
                           int timeout_ms);
/// Throws std::runtime_error when the document does not match the protocol.
RunResponse decode_response(std::string_view text);

/// Spawns the runner once. Returns the decoded response or why none was obtained
/// ("runner unavailable", "timeout: runner", "harness failure: ...").
struct RunOutcome {
  std::optional<RunResponse> response;
  std::string failure;
};
RunOutcome run_variant(std::string_view code, const std::vector<std::string>& tests,
                       const RunnerSpec& runner);

struct BatchItem {
  std::string original;
  std::string simplified;
  std::vector<std::string> tests;
};

/// check_dynamic over many pairs, at most runner.max_parallel at a time.
/// Results are in input order.
std::vector<Verdict> check_batch(const std::vector<BatchItem>& items, const RunnerSpec& runner);

}  // namespace shortcoder::equivalence
