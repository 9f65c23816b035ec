#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shortcoder/dataset/dataset.hpp"
#include "support.hpp"

using namespace shortcoder;
using namespace shortcoder::dataset;
using rules::RuleId;
using test_support::fixture;
using test_support::ScratchDir;
using test_support::slurp;

namespace {

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

rules::RuleConfig strict() {
  rules::RuleConfig c;
  c.strictness = rules::Strictness::Strict;
  return c;
}

ProblemRecord record(std::string id, std::string code) {
  return {std::move(id), "", std::move(code), {}};
}

std::vector<ProblemRecord> corpus() {
  return ingest(test_support::data("mbpp_style.jsonl").string(), CorpusFormat::Mbpp).records;
}

}  // namespace

TEST_CASE("ingest mbpp") {
  ScratchDir dir("ingest");
  const auto path = dir.file("c.jsonl");
  write(path,
        "{\"task_id\": 1, \"text\": \"a\", \"code\": \"x = 1\\n\", \"test_list\": [\"assert x == 1\"]}\n"
        "{\"task_id\": \"b\", \"text\": \"b\", \"code\": \"y = 2\\n\", \"test_list\": []}\n"
        "{\"task_id\": 3, \"text\": \"c\", \"code\": \"z = 3\\n\", \"test_list\": []}\n");
  const auto r = ingest(path, CorpusFormat::Mbpp);
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].task_id == "1");
  CHECK(r.records[1].task_id == "b");
  CHECK(r.records[2].code == "z = 3\n");
  CHECK(r.records[0].test_list == std::vector<std::string>{"assert x == 1"});
  CHECK(r.skipped.empty());
}

TEST_CASE("ingest skips bad lines with their line number") {
  ScratchDir dir("skip");
  const auto path = dir.file("c.jsonl");
  write(path,
        "{\"task_id\": 1, \"text\": \"a\", \"code\": \"x = 1\\n\", \"test_list\": []}\n"
        "{\"task_id\": 2, \"text\": \"b\", \"test_list\": []}\n"
        "not json\n"
        "{\"task_id\": 1, \"text\": \"dup\", \"code\": \"y = 1\\n\", \"test_list\": []}\n");
  const auto r = ingest(path, CorpusFormat::Mbpp);
  CHECK(r.records.size() == 1);
  REQUIRE(r.skipped.size() == 3);
  CHECK(r.skipped[0].line == 2);
  CHECK(r.skipped[1].line == 3);
  CHECK(r.skipped[2].line == 4);
  CHECK(r.skipped[2].message == "duplicate task_id");
}

TEST_CASE("ingest humaneval") {
  ScratchDir dir("he");
  const auto path = dir.file("he.jsonl");
  write(path,
        "{\"task_id\": \"HumanEval/0\", \"prompt\": \"def inc(x):\\n    \\\"\\\"\\\"Add one.\\\"\\\"\\\"\\n\","
        " \"canonical_solution\": \"    return (x + 1)\\n\", \"test\": \"def check(f):\\n    assert f(1) == 2\\n\","
        " \"entry_point\": \"inc\"}\n");
  const auto r = ingest(path, CorpusFormat::HumanEval);
  REQUIRE(r.records.size() == 1);
  const auto& rec = r.records[0];
  CHECK(rec.code == "def inc(x):\n    \"\"\"Add one.\"\"\"\n    return (x + 1)\n");
  CHECK_NOTHROW(syntax::parse(rec.code));
  REQUIRE(rec.test_list.size() == 1);
  CHECK(rec.test_list[0].find("check(inc)") != std::string::npos);
  CHECK(parse_format("humaneval-jsonl") == CorpusFormat::HumanEval);
  CHECK_FALSE(parse_format("csv").has_value());
}

TEST_CASE("ingest errors") {
  ScratchDir dir("err");
  CHECK_THROWS_AS(ingest(dir.file("missing.jsonl"), CorpusFormat::Mbpp), std::runtime_error);
  write(dir.file("empty.jsonl"), "");
  CHECK_THROWS_AS(ingest(dir.file("empty.jsonl"), CorpusFormat::Mbpp), EmptyCorpus);
  write(dir.file("bad.jsonl"), "{\"code\": 1}\n");
  CHECK_THROWS_AS(ingest(dir.file("bad.jsonl"), CorpusFormat::Mbpp), EmptyCorpus);
}

TEST_CASE("multi-rule record yields both paradigms") {
  const auto code = slurp(fixture("figures/multi_rule.original.py"));
  const auto built = build_pairs({record("fig", code)}, strict(), {});
  CHECK(built.errors.empty());
  REQUIRE(built.pairs.size() == 3);
  const auto& p = built.pairs;
  CHECK(p[0].mode == Mode::Independent);
  CHECK(p[0].rules_applied == std::vector<RuleId>{RuleId::R2});
  CHECK(p[0].simplified_code == slurp(fixture("figures/multi_rule.sample1.py")));
  CHECK(p[1].mode == Mode::Independent);
  CHECK(p[1].rules_applied == std::vector<RuleId>{RuleId::R4});
  CHECK(p[1].simplified_code == slurp(fixture("figures/multi_rule.sample2.py")));
  CHECK(p[2].mode == Mode::Joint);
  CHECK(p[2].rules_applied == std::vector<RuleId>{RuleId::R2, RuleId::R4});
  CHECK(p[2].simplified_code == slurp(fixture("figures/multi_rule.sample3.py")));
  CHECK(p[2].pair_id == "fig/joint/R2+R4");
  CHECK(p[0].pair_id == "fig/independent/R2");

  const auto s = stats(p);
  CHECK(s.total == 3);
  CHECK(s.per_mode.at("independent") == 2);
  CHECK(s.per_mode.at("joint") == 1);
}

TEST_CASE("single-rule and no-rule records") {
  const auto none = build_pairs({record("n", "pass\n")}, strict(), {});
  CHECK(none.pairs.empty());
  const auto one = build_pairs({record("r3", "x = x + 1\n")}, strict(), {});
  REQUIRE(one.pairs.size() == 1);
  CHECK(one.pairs[0].mode == Mode::Independent);
  CHECK(one.pairs[0].simplified_code == "x += 1\n");
  CHECK(one.pairs[0].original_tokens == 6);
  CHECK(one.pairs[0].simplified_tokens == 4);
  CHECK(one.pairs[0].reduction_pct == doctest::Approx(100.0 / 3));
  CHECK(build_pairs({record("r3", "x = x + 1\n")}, strict(), {false, true}).pairs.empty());
}

TEST_CASE("parse failures are collected") {
  const auto r = build_pairs({record("bad", "x = (\n"), record("ok", "x = x + 1\n")}, strict(), {});
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].task_id == "bad");
  CHECK(r.pairs.size() == 1);
}

TEST_CASE("corpus build matches the recount oracle") {
  const auto recs = corpus();
  REQUIRE(recs.size() == 50);
  const auto built = build_pairs(recs, strict(), {});
  CHECK(built.errors.empty());
  const auto oracle = test_support::load_json(fixture("corpus_pairs_recount.json"));
  const auto s = stats(built.pairs);
  CHECK(s.total == oracle.at("total").get<std::size_t>());
  CHECK(s.original_tokens == oracle.at("original_tokens").get<std::size_t>());
  CHECK(s.simplified_tokens == oracle.at("simplified_tokens").get<std::size_t>());
  CHECK(s.reduction_pct == doctest::Approx(oracle.at("reduction_pct").get<double>()));
  for (const auto& [mode, n] : oracle.at("per_mode").items()) CHECK(s.per_mode.at(mode) == n);
  for (const auto& [rule, n] : oracle.at("per_rule").items()) CHECK(s.per_rule.at(rule) == n);
  std::size_t sum = 0;
  for (const auto& [mode, n] : s.per_mode) sum += n;
  CHECK(sum == s.total);

  for (const auto& p : built.pairs) {
    CAPTURE(p.pair_id);
    CHECK(p.simplified_code != p.original_code);
    CHECK(p.simplified_tokens < p.original_tokens);
    if (p.mode == Mode::Independent) CHECK(p.rules_applied.size() == 1);
    if (p.mode == Mode::Joint) CHECK(p.rules_applied.size() >= 2);
    CHECK_NOTHROW(syntax::parse(p.simplified_code));
  }
}

TEST_CASE("parallel build equals the serial reference") {
  const auto recs = corpus();
  for (const auto strictness : {rules::Strictness::Strict, rules::Strictness::PaperFaithful}) {
    auto cfg = strict();
    cfg.strictness = strictness;
    const auto par = build_pairs(recs, cfg, {});
    const auto ser = build_pairs_serial(recs, cfg, {});
    CHECK(par.pairs == ser.pairs);
    CHECK(par.errors.size() == ser.errors.size());
    CHECK(build_pairs(recs, cfg, {}).pairs == par.pairs);
  }
}

TEST_CASE("emit and read back") {
  ScratchDir dir("emit");
  CHECK(emit({}, dir.file("empty.jsonl")) == 0);
  CHECK(slurp(dir.path() / "empty.jsonl").empty());

  const auto pairs = build_pairs({record("fig", slurp(fixture("figures/multi_rule.original.py")))},
                                 strict(), {})
                         .pairs;
  std::vector<CodePair> two(pairs.begin(), pairs.begin() + 2);
  CHECK(emit(two, dir.file("a.jsonl")) == 2);
  CHECK(emit(two, dir.file("b.jsonl")) == 2);
  const auto a = slurp(dir.path() / "a.jsonl");
  CHECK(a == slurp(dir.path() / "b.jsonl"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 2);
  CHECK(read_pairs(dir.file("a.jsonl")) == two);

  // Field order is fixed.
  const auto line = to_jsonl_line(two[0]);
  const char* fields[] = {"pair_id", "source_task_id", "mode", "rules_applied", "original_code",
                          "simplified_code", "original_tokens", "simplified_tokens",
                          "reduction_pct", "validated"};
  std::size_t at = 0;
  for (const char* f : fields) {
    const auto pos = line.find(std::string("\"") + f + "\"");
    REQUIRE(pos != std::string::npos);
    CHECK(pos >= at);
    at = pos;
  }
  CHECK(line.find("test_list") == std::string::npos);

  CHECK_THROWS_AS(emit(two, dir.file("no/such/dir/x.jsonl")), std::runtime_error);
  std::istringstream bad("{\"pair_id\": 1}\n");
  CHECK_THROWS(read_pairs(bad));
}

TEST_CASE("stats") {
  const auto zero = stats({});
  CHECK(zero.total == 0);
  CHECK(zero.reduction_pct == 0);
  CHECK(zero.validated_rate == 0);
  CHECK(zero.per_mode.empty());
  const auto j = nlohmann::json::parse(to_json(zero));
  CHECK(j.at("total") == 0);

  auto pairs = build_pairs({record("r3", "x = x + 1\n"), record("r7", "del a\ndel b\n")}, strict(),
                           {})
                   .pairs;
  REQUIRE(pairs.size() == 2);
  pairs[0].validated = Validation::Static;
  CHECK(stats(pairs).validated_rate == 0.5);
}

TEST_CASE("enum spellings") {
  CHECK(parse_mode("llm") == Mode::Llm);
  CHECK(to_string(Mode::Joint) == "joint");
  CHECK(parse_validation("dynamic") == Validation::Dynamic);
  CHECK_FALSE(parse_mode("both").has_value());
  CHECK(make_pair_id("7", Mode::Independent, {RuleId::R10}) == "7/independent/R10");
}
