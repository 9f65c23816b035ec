#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shortcoder::metrics {

/// Byte-level BPE merge table (GPT-2 layout: one "left right" pair per line,
/// rank order, optional "#version" header, bytes mapped to printable code
/// points so a space reads as "Ġ").
class BpeVocab {
 public:
  /// Throws std::runtime_error if the file is missing or malformed.
  static BpeVocab load(const std::string& path);
  static BpeVocab from_merges(const std::vector<std::pair<std::string, std::string>>& merges);

  std::size_t count(std::string_view text) const;
  std::size_t size() const { return ranks_.size(); }

 private:
  std::size_t encode_word(std::string_view word) const;

  std::unordered_map<std::string, std::size_t> ranks_;  // "left right" -> rank
};

class TokenScheme {
 public:
  enum class Kind { Lexical, Subword };

  static TokenScheme lexical();
  static TokenScheme subword(std::shared_ptr<const BpeVocab> vocab, std::string vocab_path = {});
  /// "lexical" or "subword:PATH".
  static TokenScheme from_spec(std::string_view spec);

  Kind kind() const { return kind_; }
  const BpeVocab* vocab() const { return vocab_.get(); }
  std::string id() const;

 private:
  Kind kind_ = Kind::Lexical;
  std::shared_ptr<const BpeVocab> vocab_;
  std::string vocab_path_;
};

struct TokenCount {
  std::string scheme;
  std::size_t count = 0;
};

/// Lexical: tokens of the Python tokenizer except NL, COMMENT and ENDMARKER.
/// Throws syntax::ParseError on text the tokenizer rejects.
TokenCount count_tokens(std::string_view source, const TokenScheme& scheme);

/// 100 * (orig - simp) / orig. Throws std::domain_error if orig counts 0 tokens.
double reduction(std::string_view original, std::string_view simplified,
                 const TokenScheme& scheme);
double reduction(std::size_t original_tokens, std::size_t simplified_tokens);

struct SampleResult {
  std::string problem_id;
  int sample_index = 0;
  bool passed = false;
};

/// Fraction of problems whose samples 0..k-1 include a pass. Throws
/// std::invalid_argument if k < 1, a sample is duplicated, or some problem
/// lacks one of the first k samples.
double pass_at_k(const std::vector<SampleResult>& results, int k);

/// One SampleResult per JSONL line. Throws std::runtime_error naming the line.
std::vector<SampleResult> read_results(std::istream& in);

/// input + generated tokens.
double total_tokens(double input_tokens, double generated_tokens);

/// total_time / n_problems. Throws std::invalid_argument if n_problems < 1.
double cost_per_problem(double total_time_seconds, long n_problems);

/// Token figures of one pair, as consumed by summarize().
struct PairTokens {
  std::vector<std::string> rules;
  std::size_t original_tokens = 0;
  std::size_t simplified_tokens = 0;
};

struct MetricsReport {
  std::string scheme;
  std::size_t pairs = 0;
  std::map<std::string, std::size_t> rule_counts;
  double mean_original_tokens = 0;
  double mean_simplified_tokens = 0;
  double reduction_pct = 0;  // over summed counts
  std::map<int, double> pass_at;
  std::optional<double> total_tokens;
  std::optional<double> cost_per_problem;
};

MetricsReport summarize(const std::vector<PairTokens>& pairs, std::string scheme);

}  // namespace shortcoder::metrics
