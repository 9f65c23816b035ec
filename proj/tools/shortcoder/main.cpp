#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

using namespace shortcoder::cli;

int main(int argc, char** argv) {
  CLI::App app{"Token-reducing simplifier for Python 3 code, with dataset and metrics tooling"};
  app.require_subcommand(1);

  SimplifyOptions simplify;
  auto* s = app.add_subcommand("simplify", "Simplify a Python file (or stdin) and print the result");
  s->add_option("input", simplify.input, "Source file, '-' for stdin")->capture_default_str();
  s->add_option("--mode", simplify.mode, "joint or independent")
      ->check(CLI::IsMember({"joint", "independent"}))
      ->capture_default_str();
  auto* rules_opt = s->add_option("--rules", simplify.rules, "Enable only these rules (R1,R7,...)")
                        ->delimiter(',');
  s->add_option("--exclude-rules", simplify.excluded, "Disable these rules")
      ->delimiter(',')
      ->excludes(rules_opt);
  s->add_option("--strictness", simplify.strictness, "strict or paper-faithful")
      ->check(CLI::IsMember({"strict", "paper-faithful"}))
      ->capture_default_str();
  s->add_option("--max-iterations", simplify.max_iterations, "Joint sweep budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s->add_flag("--metrics", simplify.metrics, "Print a token summary on stderr");
  s->add_option("--check", simplify.check, "none, static or dynamic")
      ->check(CLI::IsMember({"none", "static", "dynamic"}))
      ->capture_default_str();
  s->add_option("--test", simplify.tests, "Assertion used by --check dynamic (repeatable)");
  s->add_option("--runner", simplify.runner, "Runner command (default $SHORTCODER_RUNNER)");
  s->add_option("--timeout-ms", simplify.timeout_ms, "Per-test timeout")
      ->check(CLI::Range(100, 3600000))
      ->capture_default_str();

  auto* dataset = app.add_subcommand("dataset", "Pair dataset construction");
  dataset->require_subcommand(1);
  BuildOptions build;
  auto* b = dataset->add_subcommand("build", "Build simplification pairs from a corpus");
  b->add_option("--input", build.input, "Corpus JSONL")->required();
  b->add_option("--output", build.output, "Pairs JSONL to write")->required();
  b->add_option("--format", build.format, "mbpp-jsonl or humaneval-jsonl")
      ->check(CLI::IsMember({"mbpp-jsonl", "humaneval-jsonl"}))
      ->capture_default_str();
  b->add_option("--mode", build.mode, "independent, joint or both")
      ->check(CLI::IsMember({"independent", "joint", "both"}))
      ->capture_default_str();
  b->add_option("--strictness", build.strictness, "strict or paper-faithful")
      ->check(CLI::IsMember({"strict", "paper-faithful"}))
      ->capture_default_str();
  b->add_option("--check", build.check, "none or static")
      ->check(CLI::IsMember({"none", "static"}))
      ->capture_default_str();
  b->add_flag("--llm", build.llm, "Synthesize pairs for rules the corpus does not cover");
  b->add_option("--llm-provider", build.provider, "mock or http")
      ->check(CLI::IsMember({"mock", "http"}))
      ->capture_default_str();
  b->add_option("--seed", build.seed, "Seed for LLM synthesis")->capture_default_str();
  b->add_option("--threads", build.threads, "Worker threads (0: OpenMP default)")
      ->check(CLI::NonNegativeNumber);

  ValidateOptions validate;
  auto* v = app.add_subcommand("validate", "Differential-test pairs through the runner");
  v->add_option("--pairs", validate.pairs, "Pairs JSONL")->required();
  v->add_option("--runner", validate.runner, "Runner command (default $SHORTCODER_RUNNER)");
  v->add_option("--timeout-ms", validate.timeout_ms, "Per-test timeout")
      ->check(CLI::Range(100, 3600000))
      ->capture_default_str();
  v->add_option("--max-parallel", validate.max_parallel, "Concurrent runner processes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  v->add_option("--corpus", validate.corpus, "Corpus supplying test_list by task id");
  v->add_option("--corpus-format", validate.corpus_format, "mbpp-jsonl or humaneval-jsonl")
      ->check(CLI::IsMember({"mbpp-jsonl", "humaneval-jsonl"}))
      ->capture_default_str();

  ReportOptions report;
  auto* r = app.add_subcommand("report", "Token and efficiency report for a pairs file");
  r->add_option("--pairs", report.pairs, "Pairs JSONL")->required();
  r->add_option("--tokenizer", report.tokenizer, "lexical or subword:PATH")->capture_default_str();
  auto* results_opt = r->add_option("--results", report.results, "Sample results JSONL for pass@k");
  r->add_option("--k", report.ks, "k values for pass@k")->delimiter(',')->needs(results_opt);
  auto* in_tok = r->add_option("--input-tokens", report.input_tokens, "Mean input tokens");
  auto* gen_tok = r->add_option("--generated-tokens", report.generated_tokens, "Mean generated tokens");
  in_tok->needs(gen_tok);
  gen_tok->needs(in_tok);
  auto* time_opt = r->add_option("--total-time", report.total_time, "Total inference seconds");
  auto* problems_opt = r->add_option("--problems", report.problems, "Problem count")
                           ->check(CLI::PositiveNumber);
  time_opt->needs(problems_opt);
  problems_opt->needs(time_opt);
  r->add_option("--format", report.format, "table, json or both")
      ->check(CLI::IsMember({"table", "json", "both"}))
      ->capture_default_str();

  PasskOptions passk;
  auto* p = app.add_subcommand("passk", "pass@k from sample results");
  p->add_option("--results", passk.results, "Sample results JSONL")->required();
  p->add_option("--k", passk.ks, "k values, comma separated")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (s->parsed()) return run_simplify(simplify);
  if (b->parsed()) return run_dataset_build(build);
  if (v->parsed()) return run_validate(validate);
  if (r->parsed()) return run_report(report);
  if (p->parsed()) return run_passk(passk);
  return kUsage;
}
