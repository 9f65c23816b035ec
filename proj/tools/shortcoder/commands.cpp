#include "commands.hpp"

#include <json.hpp>
#include <omp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "shortcoder/dataset/dataset.hpp"
#include "shortcoder/equivalence/equivalence.hpp"
#include "shortcoder/llm/llm.hpp"
#include "shortcoder/metrics/metrics.hpp"
#include "shortcoder/rules/rules.hpp"
#include "shortcoder/syntax/syntax.hpp"

namespace shortcoder::cli {

namespace {

using equivalence::Status;
using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::set<rules::RuleId> parse_rules(const std::vector<std::string>& names) {
  std::set<rules::RuleId> out;
  for (const auto& n : names) {
    auto id = rules::parse_rule_id(n);
    if (!id) throw UsageError("unknown rule '" + n + "' (expected R1..R10)");
    out.insert(*id);
  }
  return out;
}

rules::RuleConfig make_config(const std::vector<std::string>& only,
                              const std::vector<std::string>& excluded,
                              const std::string& strictness, int max_iterations) {
  rules::RuleConfig c;
  if (!only.empty()) c.enabled = parse_rules(only);
  for (auto id : parse_rules(excluded)) c.enabled.erase(id);
  if (c.enabled.empty()) throw UsageError("no rules left enabled");
  c.strictness = *rules::parse_strictness(strictness);
  c.max_iterations = max_iterations;
  return c;
}

equivalence::RunnerSpec runner_from(const std::string& command, int timeout_ms, int max_parallel) {
  equivalence::RunnerSpec spec = equivalence::RunnerSpec::from_env();
  if (!command.empty()) spec.command = equivalence::RunnerSpec::split_command(command);
  spec.timeout_ms = timeout_ms;
  spec.max_parallel = max_parallel;
  return spec;
}

std::string rule_list(const std::vector<rules::RuleId>& ids) {
  std::string s;
  for (auto id : ids) s += (s.empty() ? "" : ",") + std::string(rules::to_string(id));
  return s;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const syntax::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

int run_simplify(const SimplifyOptions& o) {
  return guarded([&] {
    const rules::RuleConfig config = make_config(o.rules, o.excluded, o.strictness, o.max_iterations);
    const std::string source = read_input(o.input);
    syntax::SyntaxTree tree;
    try {
      tree = syntax::parse(source);
    } catch (const syntax::ParseError& e) {
      std::cerr << (o.input == "-" ? "<stdin>" : o.input) << ":" << e.line() << ":" << e.column()
                << ": " << e.message() << "\n";
      return kFailure;
    }

    if (o.mode == "independent") {
      const auto variants = rules::simplify_independent(tree, config);
      if (variants.empty()) std::cerr << "warning: no rule applies\n";
      for (const auto& [id, result] : variants) {
        std::cout << "# " << rules::to_string(id) << "\n" << syntax::render(result.tree);
      }
      return kOk;
    }

    const rules::RewriteResult result = rules::simplify_joint(tree, config);
    const std::string out = syntax::render(result.tree);
    if (o.check != "none") {
      const auto verdict =
          o.check == "static"
              ? equivalence::check_static(source, out)
              : equivalence::check_dynamic(source, out, o.tests, runner_from(o.runner, o.timeout_ms, 1));
      if (verdict.status == Status::Inequivalent) {
        std::cerr << "check failed: inequivalent: " << verdict.detail << "\n";
        return kFailure;
      }
      if (verdict.status == Status::Inconclusive) {
        std::cerr << "warning: check inconclusive: " << verdict.detail << "\n";
      }
    }
    std::cout << out;
    if (o.metrics) {
      const auto scheme = metrics::TokenScheme::lexical();
      const auto before = metrics::count_tokens(source, scheme).count;
      const auto after = metrics::count_tokens(out, scheme).count;
      std::vector<rules::RuleId> ids;
      for (const auto& f : result.fired) ids.push_back(f.rule);
      std::fprintf(stderr, "tokens: %zu -> %zu (%.2f%% reduction), sweeps: %d, fired: %s\n", before,
                   after, before ? metrics::reduction(before, after) : 0.0, result.iterations,
                   ids.empty() ? "none" : rule_list(ids).c_str());
    }
    return kOk;
  });
}

int run_dataset_build(const BuildOptions& o) {
  return guarded([&] {
    if (o.threads > 0) omp_set_num_threads(o.threads);
    rules::RuleConfig config;
    config.strictness = *rules::parse_strictness(o.strictness);

    dataset::IngestResult corpus;
    try {
      corpus = dataset::ingest(o.input, *dataset::parse_format(o.format));
    } catch (const dataset::EmptyCorpus& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kFailure;
    }
    for (const auto& d : corpus.skipped) {
      std::cerr << "warning: " << o.input << ":" << d.line << ": skipped: " << d.message << "\n";
    }

    dataset::BuildModes modes;
    modes.independent = o.mode != "joint";
    modes.joint = o.mode != "independent";
    dataset::BuildResult built = dataset::build_pairs(corpus.records, config, modes);
    for (const auto& d : built.errors) {
      std::cerr << "warning: " << d.task_id << ": " << d.message << "\n";
    }

    std::vector<dataset::CodePair> pairs;
    for (auto& p : built.pairs) {
      if (o.check == "static") {
        const auto v = equivalence::check_static(p.original_code, p.simplified_code);
        if (v.status == Status::Inequivalent) {
          std::cerr << "warning: " << p.pair_id << ": dropped, " << v.detail << "\n";
          continue;
        }
        p.validated = dataset::Validation::Static;
      }
      pairs.push_back(std::move(p));
    }

    if (o.llm) {
      std::set<rules::RuleId> covered;
      for (const auto& p : pairs) covered.insert(p.rules_applied.begin(), p.rules_applied.end());
      llm::ProviderConfig provider_config = llm::ProviderConfig::from_env();
      if (o.provider == "http" && provider_config.endpoint.empty()) {
        std::cerr << "error: SHORTCODER_LLM_ENDPOINT is not set\n";
        return kFailure;
      }
      for (auto id : config.enabled) {
        if (covered.count(id)) continue;
        std::unique_ptr<llm::ChatProvider> provider;
        if (o.provider == "http") {
          provider = std::make_unique<llm::HttpChatProvider>(provider_config);
        } else {
          provider = std::make_unique<llm::MockProvider>(llm::MockProvider::for_rule(id));
        }
        const auto s = llm::synthesize_pair(*provider, provider_config, id, o.seed,
                                            llm::PromptTemplate::default_template(), config.strictness);
        if (s.pair) {
          pairs.push_back(*s.pair);
        } else {
          std::cerr << "warning: " << rules::to_string(id) << ": no LLM pair after " << s.attempts
                    << " attempts: " << (s.rejections.empty() ? "?" : s.rejections.back()) << "\n";
        }
      }
    }

    dataset::emit(pairs, o.output);
    if (pairs.empty()) std::cerr << "warning: no pairs produced\n";
    std::cout << dataset::to_json(dataset::stats(pairs)) << "\n";
    return kOk;
  });
}

int run_validate(const ValidateOptions& o) {
  return guarded([&] {
    const auto pairs = dataset::read_pairs(o.pairs);
    std::map<std::string, std::vector<std::string>> tests_by_task;
    if (!o.corpus.empty()) {
      for (auto& r : dataset::ingest(o.corpus, *dataset::parse_format(o.corpus_format)).records) {
        tests_by_task[r.task_id] = std::move(r.test_list);
      }
    }
    const auto runner = runner_from(o.runner, o.timeout_ms, o.max_parallel);
    std::vector<equivalence::BatchItem> items;
    for (const auto& p : pairs) {
      equivalence::BatchItem it{p.original_code, p.simplified_code, p.test_list};
      if (it.tests.empty()) {
        if (auto found = tests_by_task.find(p.source_task_id); found != tests_by_task.end()) {
          it.tests = found->second;
        }
      }
      items.push_back(std::move(it));
    }
    const auto verdicts = equivalence::check_batch(items, runner);

    std::map<Status, std::size_t> counts;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      ordered_json j;
      j["pair_id"] = pairs[i].pair_id;
      j["status"] = equivalence::to_string(verdicts[i].status);
      j["detail"] = verdicts[i].detail;
      std::cout << j.dump() << "\n";
      ++counts[verdicts[i].status];
    }
    std::cerr << "equivalent: " << counts[Status::Equivalent]
              << ", inequivalent: " << counts[Status::Inequivalent]
              << ", inconclusive: " << counts[Status::Inconclusive] << "\n";
    if (counts[Status::Inequivalent]) return kFailure;
    if (counts[Status::Inconclusive]) std::cerr << "warning: some pairs are inconclusive\n";
    return kOk;
  });
}

int run_report(const ReportOptions& o) {
  return guarded([&] {
    const auto scheme = metrics::TokenScheme::from_spec(o.tokenizer);
    const auto pairs = dataset::read_pairs(o.pairs);
    std::vector<metrics::PairTokens> tokens;
    for (const auto& p : pairs) {
      metrics::PairTokens t;
      for (auto id : p.rules_applied) t.rules.emplace_back(rules::to_string(id));
      t.original_tokens = metrics::count_tokens(p.original_code, scheme).count;
      t.simplified_tokens = metrics::count_tokens(p.simplified_code, scheme).count;
      tokens.push_back(std::move(t));
    }
    metrics::MetricsReport report = metrics::summarize(tokens, scheme.id());
    if (!o.results.empty()) {
      std::ifstream in(o.results);
      if (!in) throw std::runtime_error("cannot open results: " + o.results);
      const auto results = metrics::read_results(in);
      for (int k : o.ks.empty() ? std::vector<int>{1} : o.ks) report.pass_at[k] = metrics::pass_at_k(results, k);
    }
    if (o.input_tokens) report.total_tokens = metrics::total_tokens(*o.input_tokens, *o.generated_tokens);
    if (o.total_time) report.cost_per_problem = metrics::cost_per_problem(*o.total_time, *o.problems);

    if (o.format != "json") {
      std::printf("scheme            %s\n", report.scheme.c_str());
      std::printf("pairs             %zu\n", report.pairs);
      for (const auto& [id, n] : report.rule_counts) std::printf("  %-15s %zu\n", id.c_str(), n);
      std::printf("mean original     %.2f\n", report.mean_original_tokens);
      std::printf("mean simplified   %.2f\n", report.mean_simplified_tokens);
      std::printf("reduction         %.2f%%\n", report.reduction_pct);
      for (const auto& [k, v] : report.pass_at) std::printf("pass@%-12d %.3f\n", k, v);
      if (report.total_tokens) std::printf("TotalTokens       %.2f\n", *report.total_tokens);
      if (report.cost_per_problem) std::printf("Cost/Problem      %.2f s\n", *report.cost_per_problem);
    }
    if (o.format != "table") {
      ordered_json j;
      j["scheme"] = report.scheme;
      j["pairs"] = report.pairs;
      j["rule_counts"] = report.rule_counts;
      j["mean_original_tokens"] = report.mean_original_tokens;
      j["mean_simplified_tokens"] = report.mean_simplified_tokens;
      j["reduction_pct"] = report.reduction_pct;
      ordered_json pass = ordered_json::object();
      for (const auto& [k, v] : report.pass_at) pass[std::to_string(k)] = v;
      j["pass_at_k"] = pass;
      j["total_tokens"] = report.total_tokens ? ordered_json(*report.total_tokens) : ordered_json();
      j["cost_per_problem"] =
          report.cost_per_problem ? ordered_json(*report.cost_per_problem) : ordered_json();
      std::cout << j.dump() << "\n";
    }
    return kOk;
  });
}

int run_passk(const PasskOptions& o) {
  return guarded([&] {
    std::ifstream in(o.results);
    if (!in) throw std::runtime_error("cannot open results: " + o.results);
    const auto results = metrics::read_results(in);
    std::vector<std::pair<int, double>> values;
    for (int k : o.ks) values.emplace_back(k, metrics::pass_at_k(results, k));
    for (const auto& [k, v] : values) std::printf("pass@%d %.3f\n", k, v);
    return kOk;
  });
}

}  // namespace shortcoder::cli
