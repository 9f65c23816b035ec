#pragma once

#include <optional>
#include <string>
#include <vector>

namespace shortcoder::cli {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct SimplifyOptions {
  std::string input = "-";
  std::string mode = "joint";
  std::vector<std::string> rules;
  std::vector<std::string> excluded;
  std::string strictness = "paper-faithful";
  int max_iterations = 32;
  bool metrics = false;
  std::string check = "none";
  std::vector<std::string> tests;
  std::string runner;
  int timeout_ms = 5000;
};

struct BuildOptions {
  std::string input;
  std::string output;
  std::string format = "mbpp-jsonl";
  std::string mode = "both";
  std::string strictness = "strict";
  std::string check = "static";
  bool llm = false;
  std::string provider = "mock";
  long seed = 0;
  int threads = 0;
};

struct ValidateOptions {
  std::string pairs;
  std::string runner;
  int timeout_ms = 5000;
  int max_parallel = 4;
  std::string corpus;
  std::string corpus_format = "mbpp-jsonl";
};

struct ReportOptions {
  std::string pairs;
  std::string tokenizer = "lexical";
  std::string results;
  std::vector<int> ks;
  std::optional<double> input_tokens;
  std::optional<double> generated_tokens;
  std::optional<double> total_time;
  std::optional<long> problems;
  std::string format = "both";
};

struct PasskOptions {
  std::string results;
  std::vector<int> ks;
};

int run_simplify(const SimplifyOptions& o);
int run_dataset_build(const BuildOptions& o);
int run_validate(const ValidateOptions& o);
int run_report(const ReportOptions& o);
int run_passk(const PasskOptions& o);

}  // namespace shortcoder::cli
