#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shortcoder/rules/rules.hpp"
#include "support.hpp"

using namespace shortcoder;
using rules::RuleConfig;
using rules::RuleId;
using rules::Strictness;
using test_support::fixture;
using test_support::slurp;

namespace {

RuleConfig config(Strictness s, std::set<RuleId> enabled = {rules::kAllRules.begin(),
                                                           rules::kAllRules.end()}) {
  RuleConfig c;
  c.strictness = s;
  c.enabled = std::move(enabled);
  return c;
}

std::size_t tokens(const std::string& src) {
  return syntax::count_significant(syntax::tokenize(src));
}

std::string apply(const std::string& src, RuleId id, Strictness s = Strictness::PaperFaithful) {
  return syntax::render(rules::apply_rule(syntax::parse(src), id, config(s)).tree);
}

std::string joint(const std::string& src, Strictness s = Strictness::Strict) {
  return syntax::render(rules::simplify_joint(syntax::parse(src), config(s)).tree);
}

std::vector<std::string> corpus_code() {
  std::vector<std::string> out;
  std::ifstream in(test_support::data("mbpp_style.jsonl"));
  std::string line;
  while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line).at("code"));
  return out;
}

const std::pair<const char*, RuleId> kFigures[] = {
    {"r1_multi_assignment", RuleId::R1}, {"r2_return_parens", RuleId::R2},
    {"r3_compound_assignment", RuleId::R3}, {"r4_conditional_assignment", RuleId::R4},
    {"r5_elif", RuleId::R5}, {"r6_list_comprehension", RuleId::R6},
    {"r7_del", RuleId::R7}, {"r8_dict_get", RuleId::R8},
    {"r9_str_format", RuleId::R9}, {"r10_file_read", RuleId::R10},
    {"r10_file_write", RuleId::R10},
};

}  // namespace

TEST_CASE("catalog") {
  const auto& cat = rules::catalog();
  REQUIRE(cat.size() == 10);
  for (std::size_t i = 0; i < cat.size(); ++i) {
    CHECK(static_cast<std::size_t>(cat[i].id) == i + 1);
    CHECK_FALSE(cat[i].name.empty());
    CHECK_FALSE(cat[i].description.empty());
  }
  CHECK(rules::parse_rule_id("r3") == RuleId::R3);
  CHECK(rules::parse_rule_id("R10") == RuleId::R10);
  CHECK_FALSE(rules::parse_rule_id("R11").has_value());
  CHECK(rules::parse_strictness("paper-faithful") == Strictness::PaperFaithful);
  CHECK_FALSE(rules::parse_strictness("loose").has_value());
}

TEST_CASE("config validation") {
  RuleConfig c;
  c.enabled.clear();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = RuleConfig{};
  c.max_iterations = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(rules::apply_rule(syntax::parse("x = x + 1\n"), RuleId::R3,
                                    config(Strictness::Strict, {RuleId::R7})),
                  std::invalid_argument);
}

TEST_CASE("golden figures, paper-faithful") {
  for (const auto& [name, id] : kFigures) {
    CAPTURE(name);
    const auto before = slurp(fixture(std::string("figures/") + name + ".before.py"));
    const auto after = slurp(fixture(std::string("figures/") + name + ".after.py"));
    const auto result = rules::apply_rule(syntax::parse(before), id, config(Strictness::PaperFaithful));
    CHECK(syntax::render(result.tree) == after);
    CHECK_FALSE(result.fired.empty());
  }
}

TEST_CASE("strict mode guards") {
  const auto r4 = slurp(fixture("figures/r4_conditional_assignment.before.py"));
  CHECK(apply(r4, RuleId::R4, Strictness::Strict) == "flag = bool(condition)\n");

  CHECK(apply("a = []\nb = []\n", RuleId::R1, Strictness::Strict) == "a = []\nb = []\n");
  CHECK(apply("a = []\nb = []\n", RuleId::R1, Strictness::PaperFaithful) == "a = []\nb = []\n");
  CHECK(apply("a = (1, 'x')\nb = (1, 'x')\n", RuleId::R1, Strictness::Strict) ==
        "a = b = (1, 'x')\n");

  const auto r9 = slurp(fixture("figures/r9_str_format.before.py"));
  CHECK(apply(r9, RuleId::R9, Strictness::Strict) == r9);
  // Two operands never shrink under .format(); three placeholders do.
  CHECK(apply("m = 'n=' + str(n)\n", RuleId::R9, Strictness::Strict) == "m = 'n=' + str(n)\n");
  CHECK(apply("m = 'a' + str(x) + 'b' + str(y) + 'c'\n", RuleId::R9, Strictness::Strict) ==
        "m = 'a{}b{}c'.format(x, y)\n");

  CHECK(apply("x.y = x.y + 1\n", RuleId::R3, Strictness::Strict) == "x.y = x.y + 1\n");
  CHECK(apply("x.y = x.y + 1\n", RuleId::R3, Strictness::PaperFaithful) == "x.y += 1\n");
  CHECK(apply("x = x + x\n", RuleId::R3, Strictness::PaperFaithful) == "x = x + x\n");

  const std::string effectful =
      "if k in load():\n    v = load()[k]\nelse:\n    v = 0\n";
  CHECK(apply(effectful, RuleId::R8, Strictness::Strict) == effectful);
}

TEST_CASE("rule examples") {
  CHECK(apply("x = y + 1\n", RuleId::R3) == "x = y + 1\n");
  CHECK(rules::apply_rule(syntax::parse("x = y + 1\n"), RuleId::R3, config(Strictness::Strict))
            .fired.empty());
  CHECK(apply("del a\ndel b\ndel c\n", RuleId::R7) == "del a, b, c\n");
  CHECK(apply("if k not in d:\n    v = 0\nelse:\n    v = d[k]\n", RuleId::R8) ==
        "v = d.get(k, 0)\n");
  CHECK(apply("r = {}\nfor t in xs:\n    r[t] = t * t\n", RuleId::R6) ==
        "r = {t: t * t for t in xs}\n");
  CHECK(apply("r = []\nfor t in xs:\n    if t:\n        r.append(t)\n", RuleId::R6) ==
        "r = [t for t in xs if t]\n");
  // Initializer must be adjacent; the loop must not break.
  CHECK(apply("r = []\nn = 0\nfor t in xs:\n    r.append(t)\n", RuleId::R6) ==
        "r = []\nn = 0\nfor t in xs:\n    r.append(t)\n");
  CHECK(apply("r = []\nfor t in xs:\n    r.append(t)\n    break\n", RuleId::R6) ==
        "r = []\nfor t in xs:\n    r.append(t)\n    break\n");
  CHECK(apply("def f():\n    return (yield)\n", RuleId::R2) == "def f():\n    return (yield)\n");
  // The handle is still used after close.
  const std::string reopened = "f = open(p)\nx = f.read()\nf.close()\nprint(f.closed)\n";
  CHECK(apply(reopened, RuleId::R10) == reopened);
}

TEST_CASE("applicable_rules") {
  const auto cfg = config(Strictness::Strict);
  const auto r6 = slurp(fixture("figures/r6_list_comprehension.before.py"));
  CHECK(rules::applicable_rules(syntax::parse(r6), cfg) == std::set<RuleId>{RuleId::R6});
  CHECK(rules::applicable_rules(syntax::parse("pass\n"), cfg).empty());
  const std::string both =
      "x = x + 1\nif a:\n    y = 1\nelse:\n    if b:\n        y = 2\n    else:\n        z = 3\n";
  CHECK(rules::applicable_rules(syntax::parse(both), cfg) ==
        std::set<RuleId>{RuleId::R3, RuleId::R5});
}

TEST_CASE("simplify_joint examples") {
  const auto original = slurp(fixture("figures/multi_rule.original.py"));
  CHECK(joint(original, Strictness::PaperFaithful) == slurp(fixture("figures/multi_rule.sample3.py")));
  CHECK(joint(original, Strictness::Strict) == slurp(fixture("figures/multi_rule.sample3.py")));

  const auto pass = rules::simplify_joint(syntax::parse("pass\n"), config(Strictness::Strict));
  CHECK(pass.iterations == 1);
  CHECK(pass.fired.empty());
  CHECK(syntax::render(pass.tree) == "pass\n");

  const auto cond = rules::simplify_joint(
      syntax::parse("if c:\n    r = x + 1\nelse:\n    r = x - 1\n"), config(Strictness::Strict));
  CHECK(syntax::render(cond.tree) == "r = x + 1 if c else x - 1\n");
  CHECK(cond.iterations == 2);
  REQUIRE(cond.fired.size() == 1);
  CHECK(cond.fired[0].rule == RuleId::R4);
}

TEST_CASE("budget exhaustion") {
  auto cfg = config(Strictness::Strict);
  cfg.max_iterations = 1;
  CHECK_THROWS_AS(rules::simplify_joint(syntax::parse("x = x + 1\n"), cfg), rules::BudgetExhausted);
  CHECK_NOTHROW(rules::simplify_joint(syntax::parse("pass\n"), cfg));
}

TEST_CASE("simplify_independent examples") {
  const auto cfg = config(Strictness::PaperFaithful);
  const auto variants =
      rules::simplify_independent(syntax::parse(slurp(fixture("figures/multi_rule.original.py"))), cfg);
  REQUIRE(variants.size() == 2);
  CHECK(variants[0].first == RuleId::R2);
  CHECK(syntax::render(variants[0].second.tree) == slurp(fixture("figures/multi_rule.sample1.py")));
  CHECK(variants[1].first == RuleId::R4);
  CHECK(syntax::render(variants[1].second.tree) == slurp(fixture("figures/multi_rule.sample2.py")));

  CHECK(rules::simplify_independent(syntax::parse("pass\n"), cfg).empty());

  const std::string src = "x = x + 1\ndel a\ndel b\n";
  const auto two = rules::simplify_independent(syntax::parse(src), cfg);
  REQUIRE(two.size() == 2);
  CHECK(syntax::render(two[0].second.tree) == "x += 1\ndel a\ndel b\n");
  CHECK(syntax::render(two[1].second.tree) == "x = x + 1\ndel a, b\n");
  // Sites of different rules do not overlap.
  for (const auto& a : two[0].second.fired) {
    for (const auto& b : two[1].second.fired) {
      CHECK((a.site.end <= b.site.begin || b.site.end <= a.site.begin));
    }
  }
}

TEST_CASE("corpus properties") {
  const auto codes = corpus_code();
  REQUIRE(codes.size() == 50);
  for (const auto strictness : {Strictness::Strict, Strictness::PaperFaithful}) {
    const auto cfg = config(strictness);
    for (const auto& code : codes) {
      CAPTURE(code);
      const auto tree = syntax::parse(code);
      const auto base = syntax::render(tree);
      const auto base_tokens = tokens(base);
      for (const auto id : rules::kAllRules) {
        CAPTURE(rules::to_string(id));
        const auto once = rules::apply_rule(tree, id, cfg);
        const auto out = syntax::render(once.tree);
        if (once.fired.empty()) {
          CHECK(out == base);
        } else {
          CHECK(tokens(out) < base_tokens);
          CHECK(rules::apply_rule(once.tree, id, cfg).fired.empty());
        }
        const auto again = rules::apply_rule(tree, id, cfg);
        CHECK(again.fired == once.fired);
        CHECK(syntax::render(again.tree) == out);
      }
      const auto j = rules::simplify_joint(tree, cfg);
      CHECK(j.iterations >= 1);
      CHECK(static_cast<std::size_t>(j.iterations) <= base_tokens);
      CHECK(j.iterations < cfg.max_iterations);
      CHECK(j.fired.empty() == (syntax::render(j.tree) == base));
    }
  }
}
