#include "shortcoder/equivalence/equivalence.hpp"

#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <set>
#include <stdexcept>

#include "shortcoder/syntax/syntax.hpp"
#include "subprocess.hpp"

namespace shortcoder::equivalence {

using nlohmann::json;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Equivalent:
      return "equivalent";
    case Status::Inequivalent:
      return "inequivalent";
    case Status::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

void RunnerSpec::validate() const {
  if (command.empty()) throw std::invalid_argument("runner command is empty");
  if (timeout_ms < 100) throw std::invalid_argument("timeout_ms must be at least 100");
  if (max_parallel < 1) throw std::invalid_argument("max_parallel must be at least 1");
}

std::vector<std::string> RunnerSpec::split_command(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  bool in_word = false;
  char quote = 0;
  for (char c : text) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        cur += c;
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) words.push_back(std::move(cur));
      cur.clear();
      in_word = false;
    } else {
      cur += c;
      in_word = true;
    }
  }
  if (quote) throw std::invalid_argument("unterminated quote in runner command");
  if (in_word) words.push_back(std::move(cur));
  return words;
}

RunnerSpec RunnerSpec::from_env() {
  RunnerSpec spec;
  if (const char* cmd = std::getenv("SHORTCODER_RUNNER")) spec.command = split_command(cmd);
  return spec;
}

namespace {

void collect_names(const syntax::NodePtr& n, std::set<std::string>& out) {
  if (n->kind == syntax::Kind::Name) out.insert(n->text);
  for (const auto& k : n->kids) collect_names(k, out);
}

// Names a rewrite may introduce on its own.
const std::set<std::string> kSchemaNames = {"bool"};

}  // namespace

Verdict check_static(std::string_view original, std::string_view simplified) {
  std::optional<syntax::SyntaxTree> a, b;
  std::string a_err, b_err;
  try {
    a = syntax::parse(original);
  } catch (const syntax::ParseError& e) {
    a_err = e.what();
  }
  try {
    b = syntax::parse(simplified);
  } catch (const syntax::ParseError& e) {
    b_err = e.what();
  }
  if (!a && !b) return Verdict::inconclusive("parse error on both sides");
  if (!a) return Verdict::inequivalent("parse error in original: " + a_err);
  if (!b) return Verdict::inequivalent("parse error in simplified: " + b_err);

  std::set<std::string> before, after;
  collect_names(a->root(), before);
  collect_names(b->root(), after);
  for (const auto& name : after) {
    if (!before.count(name) && !kSchemaNames.count(name)) {
      return Verdict::inequivalent("new name: " + name);
    }
  }
  if (syntax::equivalent_modulo_layout(*a, *b)) return Verdict::equivalent("same normalized tree");
  return Verdict::inconclusive("needs dynamic check");
}

std::string encode_request(std::string_view code, const std::vector<std::string>& tests,
                           int timeout_ms) {
  nlohmann::ordered_json j;
  j["code"] = code;
  j["tests"] = tests;
  j["timeout_ms"] = timeout_ms;
  return j.dump();
}

RunResponse decode_response(std::string_view text) {
  RunResponse r;
  try {
    const json j = json::parse(text);
    for (const auto& e : j.at("results")) {
      TestOutcome t;
      t.test = e.at("test").get<std::string>();
      t.status = e.at("status").get<std::string>();
      if (t.status != "pass" && t.status != "fail" && t.status != "error") {
        throw std::runtime_error("unknown status '" + t.status + "'");
      }
      const auto& cls = e.at("error_class");
      if (!cls.is_null()) t.error_class = cls.get<std::string>();
      r.results.push_back(std::move(t));
    }
    r.elapsed_ms = j.at("elapsed_ms").get<long>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed runner response: ") + e.what());
  }
  return r;
}

RunOutcome run_variant(std::string_view code, const std::vector<std::string>& tests,
                       const RunnerSpec& runner) {
  RunOutcome o;
  if (runner.command.empty()) {
    o.failure = "runner unavailable";
    return o;
  }
  // Per-test timeouts are the runner's job; this bound only catches a hung harness.
  const long budget = static_cast<long>(runner.timeout_ms) * (static_cast<long>(tests.size()) + 1) + 2000;
  const auto p = detail::run_process(runner.command, encode_request(code, tests, runner.timeout_ms),
                                     static_cast<int>(std::min<long>(budget, 1L << 30)));
  if (!p.spawned) {
    o.failure = "runner unavailable";
  } else if (p.timed_out) {
    o.failure = "timeout: runner";
  } else if (p.exit_code != 0) {
    o.failure = "harness failure: exit " + std::to_string(p.exit_code);
  } else {
    try {
      o.response = decode_response(p.out);
      if (o.response->results.size() != tests.size()) {
        o.response.reset();
        o.failure = "harness failure: result count mismatch";
      }
    } catch (const std::exception& e) {
      o.failure = std::string("harness failure: ") + e.what();
    }
  }
  return o;
}

Verdict check_dynamic(std::string_view original, std::string_view simplified,
                      const std::vector<std::string>& tests, const RunnerSpec& runner) {
  if (tests.empty()) return Verdict::inconclusive("no tests");
  const RunOutcome a = run_variant(original, tests, runner);
  if (!a.response) return Verdict::inconclusive(a.failure);
  const RunOutcome b = run_variant(simplified, tests, runner);
  if (!b.response) return Verdict::inconclusive(b.failure);

  std::optional<std::string> original_fails;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const TestOutcome& x = a.response->results[i];
    const TestOutcome& y = b.response->results[i];
    if (x.error_class == "Timeout" || y.error_class == "Timeout") {
      return Verdict::inconclusive("timeout: " + tests[i]);
    }
    // Exceptions compare by class only.
    const bool same = x.status == y.status && (x.status != "error" || x.error_class == y.error_class);
    if (!same) return Verdict::inequivalent(tests[i]);
    if (x.status != "pass" && !original_fails) original_fails = tests[i];
  }
  if (original_fails) return Verdict::inconclusive("original fails: " + *original_fails);
  return Verdict::equivalent();
}

std::vector<Verdict> check_batch(const std::vector<BatchItem>& items, const RunnerSpec& runner) {
  std::vector<Verdict> out(items.size());
  const long n = static_cast<long>(items.size());
#pragma omp parallel for schedule(dynamic) num_threads(runner.max_parallel)
  for (long i = 0; i < n; ++i) {
    const auto& it = items[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = check_dynamic(it.original, it.simplified, it.tests, runner);
  }
  return out;
}

}  // namespace shortcoder::equivalence
