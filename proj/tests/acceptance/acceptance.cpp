// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "shortcoder/dataset/dataset.hpp"
#include "shortcoder/metrics/metrics.hpp"

using namespace shortcoder;
namespace fs = std::filesystem;
using rules::RuleId;
using rules::Strictness;

namespace {

const fs::path kFixtures = SHORTCODER_FIXTURE_DIR;
const fs::path kCorpus = fs::path(SHORTCODER_DATA_DIR) / "mbpp_style.jsonl";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

rules::RuleConfig config(Strictness s) {
  rules::RuleConfig c;
  c.strictness = s;
  return c;
}

std::size_t lexical(const std::string& src) {
  return metrics::count_tokens(src, metrics::TokenScheme::lexical()).count;
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome golden_figures() {
  const std::pair<const char*, RuleId> figures[] = {
      {"r1_multi_assignment", RuleId::R1}, {"r3_compound_assignment", RuleId::R3},
      {"r4_conditional_assignment", RuleId::R4}, {"r5_elif", RuleId::R5},
      {"r6_list_comprehension", RuleId::R6}, {"r7_del", RuleId::R7},
      {"r8_dict_get", RuleId::R8}, {"r9_str_format", RuleId::R9},
      {"r10_file_read", RuleId::R10}, {"r10_file_write", RuleId::R10}};
  const auto start = std::chrono::steady_clock::now();
  int ok = 0;
  std::string failed;
  for (const auto& [name, id] : figures) {
    const auto dir = kFixtures / "figures";
    const auto before = slurp(dir / (std::string(name) + ".before.py"));
    const auto after = slurp(dir / (std::string(name) + ".after.py"));
    const auto out =
        syntax::render(rules::apply_rule(syntax::parse(before), id, config(Strictness::PaperFaithful)).tree);
    if (out == after) {
      ++ok;
    } else {
      failed += std::string(" ") + name;
    }
  }
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << ok << "/10 byte-exact in " << std::lround(ms) << " ms" << (failed.empty() ? "" : ", failed:" + failed);
  return {ok == 10 && ms < 1000, d.str()};
}

Outcome token_monotonicity(const std::vector<dataset::ProblemRecord>& corpus) {
  int rewrites = 0;
  int violations = 0;
  for (const auto s : {Strictness::Strict, Strictness::PaperFaithful}) {
    for (const auto& rec : corpus) {
      const auto tree = syntax::parse(rec.code);
      const auto base = lexical(syntax::render(tree));
      for (const auto id : rules::kAllRules) {
        const auto r = rules::apply_rule(tree, id, config(s));
        if (r.fired.empty()) continue;
        ++rewrites;
        if (lexical(syntax::render(r.tree)) >= base) ++violations;
      }
    }
  }
  return {violations == 0 && rewrites > 0,
          std::to_string(violations) + " violations over " + std::to_string(rewrites) + " rewrites"};
}

Outcome aggregate_reduction(const std::vector<dataset::ProblemRecord>& corpus) {
  std::size_t orig = 0;
  std::size_t simp = 0;
  for (const auto& rec : corpus) {
    orig += lexical(rec.code);
    simp += lexical(syntax::render(rules::simplify_joint(syntax::parse(rec.code), config(Strictness::Strict)).tree));
  }
  const double ours = metrics::reduction(orig, simp);
  const auto oracle = nlohmann::json::parse(slurp(kFixtures / "corpus_joint_recount.json"));
  const double theirs = oracle.at("reduction_pct").get<double>();
  std::ostringstream d;
  d.precision(2);
  d << std::fixed << ours << "% (" << orig << " -> " << simp << " tokens), recount oracle " << theirs
    << "%, band 10-30%";
  return {std::abs(ours - theirs) <= 0.5 && ours >= 10 && ours <= 30, d.str()};
}

Outcome composition_paradigms() {
  const auto dir = kFixtures / "figures";
  dataset::ProblemRecord rec{"fig", "", slurp(dir / "multi_rule.original.py"), {}};
  const auto pairs = dataset::build_pairs({rec}, config(Strictness::PaperFaithful), {}).pairs;
  const bool ok = pairs.size() == 3 && pairs[0].mode == dataset::Mode::Independent &&
                  pairs[0].simplified_code == slurp(dir / "multi_rule.sample1.py") &&
                  pairs[1].mode == dataset::Mode::Independent &&
                  pairs[1].simplified_code == slurp(dir / "multi_rule.sample2.py") &&
                  pairs[2].mode == dataset::Mode::Joint &&
                  pairs[2].simplified_code == slurp(dir / "multi_rule.sample3.py");
  std::string ids;
  for (const auto& p : pairs) ids += " " + p.pair_id;
  return {ok, std::to_string(pairs.size()) + " pairs:" + ids};
}

Outcome metrics_fidelity() {
  auto passk = [](const char* name, int k) {
    std::ifstream in(kFixtures / "passk" / name);
    return metrics::pass_at_k(metrics::read_results(in), k);
  };
  int ok = 0;
  int total = 0;
  auto check = [&](bool c) {
    ++total;
    ok += c ? 1 : 0;
  };
  check(passk("two_problems_k1.jsonl", 1) == 0.5);
  check(passk("all_fail.jsonl", 1) == 0.0);
  check(passk("three_problems_k2.jsonl", 2) == 2.0 / 3.0);
  check(passk("ten_samples.jsonl", 1) == 1.0 / 3.0);
  check(passk("ten_samples.jsonl", 10) == 2.0 / 3.0);
  check(metrics::total_tokens(113.86, 162.02) == 275.88);
  check(metrics::total_tokens(151.86, 214.04) == 365.9);
  check(metrics::cost_per_problem(60.0, 50) == 1.2);
  check(metrics::cost_per_problem(166.0, 50) == 3.32);
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) +
                           " exact (pass@k fixtures, 275.88, 365.9, 1.20, 3.32)"};
}

Outcome determinism() {
  const fs::path work = fs::temp_directory_path() / ("shortcoder-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(work);
  std::string contents[2];
  for (int i = 0; i < 2; ++i) {
    const auto out = work / ("run" + std::to_string(i) + ".jsonl");
    const std::string cmd = std::string("'") + SHORTCODER_CLI + "' dataset build --input '" + kCorpus.string() +
                            "' --output '" + out.string() + "' --mode both > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      fs::remove_all(work);
      return {false, "dataset build exited " + std::to_string(WEXITSTATUS(rc))};
    }
    contents[i] = slurp(out);
  }
  fs::remove_all(work);
  const auto h0 = std::hash<std::string>{}(contents[0]);
  const auto h1 = std::hash<std::string>{}(contents[1]);
  std::ostringstream d;
  d << std::hex << h0 << " vs " << h1 << std::dec << " (" << contents[0].size() << " bytes)";
  return {h0 == h1 && contents[0] == contents[1] && !contents[0].empty(), d.str()};
}

Outcome fixed_point_termination(const std::vector<dataset::ProblemRecord>& corpus) {
  int worst = 0;
  int bad = 0;
  for (const auto s : {Strictness::Strict, Strictness::PaperFaithful}) {
    const auto cfg = config(s);
    for (const auto& rec : corpus) {
      const auto tree = syntax::parse(rec.code);
      try {
        const auto r = rules::simplify_joint(tree, cfg);
        worst = std::max(worst, r.iterations);
        if (static_cast<std::size_t>(r.iterations) > lexical(syntax::render(tree))) ++bad;
      } catch (const rules::BudgetExhausted&) {
        ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(bad) + " snippets over bound or budget, max " + std::to_string(worst) +
                        " sweeps"};
}

Outcome idempotence(const std::vector<dataset::ProblemRecord>& corpus) {
  int checks = 0;
  int refired = 0;
  for (const auto s : {Strictness::Strict, Strictness::PaperFaithful}) {
    const auto cfg = config(s);
    for (const auto& rec : corpus) {
      const auto tree = syntax::parse(rec.code);
      for (const auto id : rules::kAllRules) {
        const auto once = rules::apply_rule(tree, id, cfg);
        ++checks;
        if (!rules::apply_rule(once.tree, id, cfg).fired.empty()) ++refired;
      }
    }
  }
  return {refired == 0, std::to_string(refired) + " re-fires over " + std::to_string(checks) + " rule applications"};
}

}  // namespace

int main() {
  const auto corpus = dataset::ingest(kCorpus.string(), dataset::CorpusFormat::Mbpp).records;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"golden figures", golden_figures},
      {"token monotonicity", [&] { return token_monotonicity(corpus); }},
      {"aggregate reduction", [&] { return aggregate_reduction(corpus); }},
      {"composition paradigms", composition_paradigms},
      {"metrics fidelity", metrics_fidelity},
      {"determinism", determinism},
      {"fixed-point termination", [&] { return fixed_point_termination(corpus); }},
      {"idempotence", [&] { return idempotence(corpus); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << "\n";
  }
  return failed == 0 ? 0 : 1;
}
