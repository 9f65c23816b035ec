#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shortcoder/rules/rules.hpp"

namespace shortcoder::dataset {

struct ProblemRecord {
  std::string task_id;
  std::string text;
  std::string code;
  std::vector<std::string> test_list;
};

enum class CorpusFormat { Mbpp, HumanEval };
std::optional<CorpusFormat> parse_format(std::string_view text);  // "mbpp-jsonl" / "humaneval-jsonl"

struct Diagnostic {
  int line = 0;  // 0 when not tied to an input line
  std::string task_id;
  std::string message;
};

struct IngestResult {
  std::vector<ProblemRecord> records;
  std::vector<Diagnostic> skipped;
};

class EmptyCorpus : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::runtime_error on I/O failure and EmptyCorpus when no line is valid.
IngestResult ingest(const std::string& path, CorpusFormat format);

enum class Mode { Independent, Joint, Llm };
std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view text);

enum class Validation { None, Static, Dynamic };
std::string_view to_string(Validation v);
std::optional<Validation> parse_validation(std::string_view text);

struct CodePair {
  std::string pair_id;
  std::string source_task_id;
  Mode mode = Mode::Independent;
  std::vector<rules::RuleId> rules_applied;
  std::string original_code;
  std::string simplified_code;
  std::size_t original_tokens = 0;
  std::size_t simplified_tokens = 0;
  double reduction_pct = 0;
  Validation validated = Validation::None;
  /// Not part of the emitted schema; read when a hand-written pairs file carries it.
  std::vector<std::string> test_list;

  bool operator==(const CodePair&) const = default;
};

/// task_id + "/" + mode + "/" + rule ids joined by "+".
std::string make_pair_id(const std::string& task_id, Mode mode,
                         const std::vector<rules::RuleId>& rules);

/// Fills token fields (lexical scheme) and pair_id from the other fields.
void finalize(CodePair& pair);

struct BuildModes {
  bool independent = true;
  bool joint = true;
};

struct BuildResult {
  std::vector<CodePair> pairs;
  std::vector<Diagnostic> errors;
};

/// Pairs for each record: one independent pair per applicable rule and one
/// joint pair when at least two distinct rules fired. Order is record order,
/// then mode, then rule id. Records are processed in parallel with OpenMP.
BuildResult build_pairs(const std::vector<ProblemRecord>& records, const rules::RuleConfig& config,
                        BuildModes modes);
/// Single-threaded reference; same output as build_pairs.
BuildResult build_pairs_serial(const std::vector<ProblemRecord>& records,
                               const rules::RuleConfig& config, BuildModes modes);

/// Pairs of one record, in output order. Throws syntax::ParseError.
std::vector<CodePair> pairs_for(const ProblemRecord& record, const rules::RuleConfig& config,
                                BuildModes modes);

std::string to_jsonl_line(const CodePair& pair);
/// Writes one JSON object per line; returns the count. Throws std::runtime_error on I/O.
std::size_t emit(const std::vector<CodePair>& pairs, const std::string& path);
std::vector<CodePair> read_pairs(const std::string& path);
std::vector<CodePair> read_pairs(std::istream& in);

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_mode;
  std::map<std::string, std::size_t> per_rule;
  std::size_t original_tokens = 0;
  std::size_t simplified_tokens = 0;
  double reduction_pct = 0;
  double validated_rate = 0;
};

DatasetStats stats(const std::vector<CodePair>& pairs);
std::string to_json(const DatasetStats& s);

}  // namespace shortcoder::dataset
