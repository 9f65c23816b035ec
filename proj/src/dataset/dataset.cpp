#include "shortcoder/dataset/dataset.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "shortcoder/metrics/metrics.hpp"
#include "shortcoder/syntax/syntax.hpp"

namespace shortcoder::dataset {

using nlohmann::json;
using nlohmann::ordered_json;
using rules::RuleId;

namespace {

std::string id_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::vector<std::string> string_list(const json& v) {
  if (!v.is_array()) throw std::runtime_error("expected a list of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(e.get<std::string>());
  return out;
}

ProblemRecord record_from(const json& j, CorpusFormat format) {
  ProblemRecord r;
  r.task_id = id_text(j.at("task_id"));
  if (format == CorpusFormat::Mbpp) {
    r.text = j.at("text").get<std::string>();
    r.code = j.at("code").get<std::string>();
    r.test_list = string_list(j.at("test_list"));
  } else {
    r.text = j.at("prompt").get<std::string>();
    r.code = r.text + j.at("canonical_solution").get<std::string>();
    std::string test = j.at("test").get<std::string>();
    if (j.contains("entry_point")) test += "\ncheck(" + j["entry_point"].get<std::string>() + ")\n";
    r.test_list = {test};
  }
  return r;
}

std::size_t lexical_count(const std::string& text) {
  return metrics::count_tokens(text, metrics::TokenScheme::lexical()).count;
}

std::vector<RuleId> distinct_rules(const std::vector<rules::Firing>& fired) {
  std::set<RuleId> ids;
  for (const auto& f : fired) ids.insert(f.rule);
  return {ids.begin(), ids.end()};
}

}  // namespace

std::optional<CorpusFormat> parse_format(std::string_view text) {
  if (text == "mbpp-jsonl") return CorpusFormat::Mbpp;
  if (text == "humaneval-jsonl") return CorpusFormat::HumanEval;
  return std::nullopt;
}

IngestResult ingest(const std::string& path, CorpusFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus: " + path);
  IngestResult result;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ProblemRecord r = record_from(json::parse(line), format);
      if (!seen.insert(r.task_id).second) {
        result.skipped.push_back({lineno, r.task_id, "duplicate task_id"});
        continue;
      }
      result.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      result.skipped.push_back({lineno, {}, e.what()});
    }
  }
  if (result.records.empty()) throw EmptyCorpus("no valid records in " + path);
  return result;
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Independent:
      return "independent";
    case Mode::Joint:
      return "joint";
    case Mode::Llm:
      return "llm";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : {Mode::Independent, Mode::Joint, Mode::Llm}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Validation v) {
  switch (v) {
    case Validation::None:
      return "none";
    case Validation::Static:
      return "static";
    case Validation::Dynamic:
      return "dynamic";
  }
  return "?";
}

std::optional<Validation> parse_validation(std::string_view text) {
  for (Validation v : {Validation::None, Validation::Static, Validation::Dynamic}) {
    if (to_string(v) == text) return v;
  }
  return std::nullopt;
}

std::string make_pair_id(const std::string& task_id, Mode mode, const std::vector<RuleId>& ids) {
  std::string out = task_id + "/" + std::string(to_string(mode)) + "/";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += '+';
    out += rules::to_string(ids[i]);
  }
  return out;
}

void finalize(CodePair& pair) {
  pair.pair_id = make_pair_id(pair.source_task_id, pair.mode, pair.rules_applied);
  pair.original_tokens = lexical_count(pair.original_code);
  pair.simplified_tokens = lexical_count(pair.simplified_code);
  pair.reduction_pct = pair.original_tokens
                           ? metrics::reduction(pair.original_tokens, pair.simplified_tokens)
                           : 0.0;
}

std::vector<CodePair> pairs_for(const ProblemRecord& record, const rules::RuleConfig& config,
                                BuildModes modes) {
  const syntax::SyntaxTree tree = syntax::parse(record.code);
  const std::string original = syntax::render(tree);
  std::vector<CodePair> out;
  auto add = [&](Mode mode, std::vector<RuleId> ids, const syntax::SyntaxTree& result) {
    CodePair p;
    p.source_task_id = record.task_id;
    p.mode = mode;
    p.rules_applied = std::move(ids);
    p.original_code = original;
    p.simplified_code = syntax::render(result);
    if (p.simplified_code == p.original_code) return;
    finalize(p);
    if (p.simplified_tokens >= p.original_tokens) return;
    out.push_back(std::move(p));
  };
  if (modes.independent) {
    for (auto& [id, result] : rules::simplify_independent(tree, config)) add(Mode::Independent, {id}, result.tree);
  }
  if (modes.joint) {
    const rules::RewriteResult joint = rules::simplify_joint(tree, config);
    auto ids = distinct_rules(joint.fired);
    if (ids.size() >= 2) add(Mode::Joint, std::move(ids), joint.tree);
  }
  return out;
}

namespace {

struct RecordOutcome {
  std::vector<CodePair> pairs;
  std::optional<Diagnostic> error;
};

RecordOutcome process(const ProblemRecord& record, const rules::RuleConfig& config,
                      BuildModes modes) {
  RecordOutcome o;
  try {
    o.pairs = pairs_for(record, config, modes);
  } catch (const syntax::ParseError& e) {
    o.error = Diagnostic{e.line(), record.task_id, std::string("parse error: ") + e.what()};
  } catch (const std::exception& e) {
    o.error = Diagnostic{0, record.task_id, e.what()};
  }
  return o;
}

BuildResult merge(std::vector<RecordOutcome>& outcomes) {
  BuildResult r;
  for (auto& o : outcomes) {
    for (auto& p : o.pairs) r.pairs.push_back(std::move(p));
    if (o.error) r.errors.push_back(std::move(*o.error));
  }
  return r;
}

}  // namespace

BuildResult build_pairs(const std::vector<ProblemRecord>& records, const rules::RuleConfig& config,
                        BuildModes modes) {
  config.validate();
  std::vector<RecordOutcome> outcomes(records.size());
  const auto n = static_cast<long>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    outcomes[static_cast<std::size_t>(i)] = process(records[static_cast<std::size_t>(i)], config, modes);
  }
  return merge(outcomes);
}

BuildResult build_pairs_serial(const std::vector<ProblemRecord>& records,
                               const rules::RuleConfig& config, BuildModes modes) {
  config.validate();
  std::vector<RecordOutcome> outcomes;
  outcomes.reserve(records.size());
  for (const auto& r : records) outcomes.push_back(process(r, config, modes));
  return merge(outcomes);
}

std::string to_jsonl_line(const CodePair& p) {
  ordered_json j;
  j["pair_id"] = p.pair_id;
  j["source_task_id"] = p.source_task_id;
  j["mode"] = to_string(p.mode);
  j["rules_applied"] = json::array();
  for (RuleId id : p.rules_applied) j["rules_applied"].push_back(rules::to_string(id));
  j["original_code"] = p.original_code;
  j["simplified_code"] = p.simplified_code;
  j["original_tokens"] = p.original_tokens;
  j["simplified_tokens"] = p.simplified_tokens;
  j["reduction_pct"] = p.reduction_pct;
  j["validated"] = to_string(p.validated);
  if (!p.test_list.empty()) j["test_list"] = p.test_list;
  return j.dump();
}

std::size_t emit(const std::vector<CodePair>& pairs, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& p : pairs) out << to_jsonl_line(p) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
  return pairs.size();
}

std::vector<CodePair> read_pairs(std::istream& in) {
  std::vector<CodePair> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      CodePair p;
      p.pair_id = j.at("pair_id").get<std::string>();
      p.source_task_id = id_text(j.at("source_task_id"));
      const auto mode = parse_mode(j.at("mode").get<std::string>());
      if (!mode) throw std::runtime_error("unknown mode");
      p.mode = *mode;
      for (const auto& id : j.at("rules_applied")) {
        const auto r = rules::parse_rule_id(id.get<std::string>());
        if (!r) throw std::runtime_error("unknown rule id " + id.dump());
        p.rules_applied.push_back(*r);
      }
      p.original_code = j.at("original_code").get<std::string>();
      p.simplified_code = j.at("simplified_code").get<std::string>();
      p.original_tokens = j.at("original_tokens").get<std::size_t>();
      p.simplified_tokens = j.at("simplified_tokens").get<std::size_t>();
      p.reduction_pct = j.at("reduction_pct").get<double>();
      const auto v = parse_validation(j.at("validated").get<std::string>());
      if (!v) throw std::runtime_error("unknown validated value");
      p.validated = *v;
      if (j.contains("test_list")) p.test_list = string_list(j["test_list"]);
      out.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw std::runtime_error("pairs line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CodePair> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pairs file: " + path);
  return read_pairs(in);
}

DatasetStats stats(const std::vector<CodePair>& pairs) {
  DatasetStats s;
  s.total = pairs.size();
  std::size_t validated = 0;
  for (const auto& p : pairs) {
    ++s.per_mode[std::string(to_string(p.mode))];
    for (RuleId id : p.rules_applied) ++s.per_rule[std::string(rules::to_string(id))];
    s.original_tokens += p.original_tokens;
    s.simplified_tokens += p.simplified_tokens;
    if (p.validated != Validation::None) ++validated;
  }
  if (s.original_tokens) s.reduction_pct = metrics::reduction(s.original_tokens, s.simplified_tokens);
  if (s.total) s.validated_rate = static_cast<double>(validated) / static_cast<double>(s.total);
  return s;
}

std::string to_json(const DatasetStats& s) {
  ordered_json j;
  j["total"] = s.total;
  j["per_mode"] = s.per_mode;
  j["per_rule"] = s.per_rule;
  j["original_tokens"] = s.original_tokens;
  j["simplified_tokens"] = s.simplified_tokens;
  j["reduction_pct"] = s.reduction_pct;
  j["validated_rate"] = s.validated_rate;
  return j.dump();
}

}  // namespace shortcoder::dataset
