#include "shortcoder/metrics/metrics.hpp"

#include <json.hpp>

#include <array>
#include <cctype>
#include <fstream>
#include <set>

#include "shortcoder/syntax/lexer.hpp"

namespace shortcoder::metrics {

namespace {

// GPT-2's reversible byte -> printable code point table, as UTF-8 strings.
const std::array<std::string, 256>& byte_symbols() {
  static const std::array<std::string, 256> table = [] {
    std::array<std::string, 256> t;
    auto utf8 = [](unsigned cp) {
      std::string s;
      if (cp < 0x80) {
        s += static_cast<char>(cp);
      } else {
        s += static_cast<char>(0xC0 | (cp >> 6));
        s += static_cast<char>(0x80 | (cp & 0x3F));
      }
      return s;
    };
    unsigned next = 256;
    for (unsigned b = 0; b < 256; ++b) {
      const bool printable = (b >= 33 && b <= 126) || (b >= 161 && b <= 172) || b >= 174;
      t[b] = utf8(printable ? b : next++);
    }
    return t;
  }();
  return table;
}

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }
bool is_letter(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_digit(unsigned char c) { return std::isdigit(c); }

// GPT-2 pre-tokenizer over bytes; non-ASCII bytes count as letters.
std::vector<std::string_view> pretokenize(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto u = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < n) {
    const std::size_t start = i;
    if (s[i] == '\'') {
      static constexpr std::array<std::string_view, 7> contractions = {"'s", "'t", "'re", "'ve",
                                                                      "'m", "'ll", "'d"};
      bool matched = false;
      for (auto c : contractions) {
        if (s.substr(i, c.size()) == c) {
          out.push_back(s.substr(i, c.size()));
          i += c.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    std::size_t j = i;
    if (s[j] == ' ' && j + 1 < n && !is_space(u(j + 1))) ++j;
    if (is_letter(u(j))) {
      while (j < n && is_letter(u(j))) ++j;
    } else if (is_digit(u(j))) {
      while (j < n && is_digit(u(j))) ++j;
    } else if (!is_space(u(j))) {
      while (j < n && !is_space(u(j)) && !is_letter(u(j)) && !is_digit(u(j))) ++j;
    } else {
      // A whitespace run followed by text gives up its last character, which
      // either prefixes the next word (space) or stands alone.
      while (j < n && is_space(u(j))) ++j;
      if (j < n && j - start > 1) --j;
    }
    out.push_back(s.substr(start, j - start));
    i = j;
  }
  return out;
}

}  // namespace

BpeVocab BpeVocab::from_merges(const std::vector<std::pair<std::string, std::string>>& merges) {
  BpeVocab v;
  for (const auto& [a, b] : merges) v.ranks_.emplace(a + " " + b, v.ranks_.size());
  return v;
}

BpeVocab BpeVocab::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocab file: " + path);
  std::vector<std::pair<std::string, std::string>> merges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("#version", 0) == 0) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 == line.size() ||
        line.find(' ', sp + 1) != std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'left right'");
    }
    merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  if (merges.empty()) throw std::runtime_error("vocab file has no merges: " + path);
  return from_merges(merges);
}

std::size_t BpeVocab::encode_word(std::string_view word) const {
  const auto& table = byte_symbols();
  std::vector<std::string> parts;
  parts.reserve(word.size());
  for (unsigned char c : word) parts.push_back(table[c]);
  while (parts.size() > 1) {
    std::size_t best = ranks_.size();
    std::size_t at = 0;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      auto it = ranks_.find(parts[i] + " " + parts[i + 1]);
      if (it != ranks_.end() && it->second < best) {
        best = it->second;
        at = i;
      }
    }
    if (best == ranks_.size()) break;
    // Merge every occurrence of the winning pair, left to right.
    const std::string left = parts[at];
    const std::string right = parts[at + 1];
    std::vector<std::string> merged;
    merged.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i + 1 < parts.size() && parts[i] == left && parts[i + 1] == right) {
        merged.push_back(left + right);
        ++i;
      } else {
        merged.push_back(parts[i]);
      }
    }
    parts = std::move(merged);
  }
  return parts.size();
}

std::size_t BpeVocab::count(std::string_view text) const {
  std::size_t total = 0;
  for (auto word : pretokenize(text)) total += encode_word(word);
  return total;
}

TokenScheme TokenScheme::lexical() { return TokenScheme{}; }

TokenScheme TokenScheme::subword(std::shared_ptr<const BpeVocab> vocab, std::string vocab_path) {
  if (!vocab) throw std::invalid_argument("subword scheme needs a vocab");
  TokenScheme s;
  s.kind_ = Kind::Subword;
  s.vocab_ = std::move(vocab);
  s.vocab_path_ = std::move(vocab_path);
  return s;
}

TokenScheme TokenScheme::from_spec(std::string_view spec) {
  if (spec == "lexical") return lexical();
  constexpr std::string_view prefix = "subword:";
  if (spec.substr(0, prefix.size()) == prefix && spec.size() > prefix.size()) {
    std::string path(spec.substr(prefix.size()));
    return subword(std::make_shared<BpeVocab>(BpeVocab::load(path)), path);
  }
  throw std::invalid_argument("unknown tokenizer '" + std::string(spec) +
                              "' (expected lexical or subword:PATH)");
}

std::string TokenScheme::id() const {
  if (kind_ == Kind::Lexical) return "lexical";
  return vocab_path_.empty() ? "subword" : "subword:" + vocab_path_;
}

TokenCount count_tokens(std::string_view source, const TokenScheme& scheme) {
  if (scheme.kind() == TokenScheme::Kind::Lexical) {
    return {scheme.id(), syntax::count_significant(syntax::tokenize(source))};
  }
  return {scheme.id(), scheme.vocab()->count(source)};
}

double reduction(std::size_t original_tokens, std::size_t simplified_tokens) {
  if (original_tokens == 0) throw std::domain_error("reduction of an empty original");
  return 100.0 * (static_cast<double>(original_tokens) - static_cast<double>(simplified_tokens)) /
         static_cast<double>(original_tokens);
}

double reduction(std::string_view original, std::string_view simplified,
                 const TokenScheme& scheme) {
  return reduction(count_tokens(original, scheme).count, count_tokens(simplified, scheme).count);
}

double pass_at_k(const std::vector<SampleResult>& results, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::map<std::string, std::vector<int>> outcome;  // -1 missing, 0 fail, 1 pass
  for (const auto& r : results) {
    if (r.sample_index < 0) {
      throw std::invalid_argument("negative sample_index for problem " + r.problem_id);
    }
    auto& v = outcome[r.problem_id];
    const auto idx = static_cast<std::size_t>(r.sample_index);
    if (v.size() <= idx) v.resize(idx + 1, -1);
    if (v[idx] != -1) {
      throw std::invalid_argument("duplicate sample " + std::to_string(r.sample_index) +
                                  " for problem " + r.problem_id);
    }
    v[idx] = r.passed ? 1 : 0;
  }
  if (outcome.empty()) throw std::invalid_argument("no results");
  std::size_t solved = 0;
  for (const auto& [id, v] : outcome) {
    bool any = false;
    for (int i = 0; i < k; ++i) {
      if (static_cast<std::size_t>(i) >= v.size() || v[static_cast<std::size_t>(i)] == -1) {
        throw std::invalid_argument("problem " + id + " has fewer than " + std::to_string(k) +
                                    " samples");
      }
      any = any || v[static_cast<std::size_t>(i)] == 1;
    }
    if (any) ++solved;
  }
  return static_cast<double>(solved) / static_cast<double>(outcome.size());
}

std::vector<SampleResult> read_results(std::istream& in) {
  std::vector<SampleResult> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SampleResult r;
      const auto& id = j.at("problem_id");
      r.problem_id = id.is_string() ? id.get<std::string>() : id.dump();
      r.sample_index = j.at("sample_index").get<int>();
      r.passed = j.at("passed").get<bool>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("results line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

double total_tokens(double input_tokens, double generated_tokens) {
  return input_tokens + generated_tokens;
}

double cost_per_problem(double total_time_seconds, long n_problems) {
  if (n_problems < 1) throw std::invalid_argument("cost_per_problem needs at least one problem");
  return total_time_seconds / static_cast<double>(n_problems);
}

MetricsReport summarize(const std::vector<PairTokens>& pairs, std::string scheme) {
  MetricsReport r;
  r.scheme = std::move(scheme);
  r.pairs = pairs.size();
  std::size_t orig = 0;
  std::size_t simp = 0;
  for (const auto& p : pairs) {
    for (const auto& id : p.rules) ++r.rule_counts[id];
    orig += p.original_tokens;
    simp += p.simplified_tokens;
  }
  if (!pairs.empty()) {
    r.mean_original_tokens = static_cast<double>(orig) / static_cast<double>(pairs.size());
    r.mean_simplified_tokens = static_cast<double>(simp) / static_cast<double>(pairs.size());
  }
  if (orig > 0) r.reduction_pct = reduction(orig, simp);
  return r;
}

}  // namespace shortcoder::metrics
