#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shortcoder/syntax/syntax.hpp"
#include "support.hpp"

using namespace shortcoder::syntax;
using test_support::fixture;
using test_support::data;

namespace {

std::vector<std::string> corpus_code() {
  std::vector<std::string> out;
  std::ifstream in(data("mbpp_style.jsonl"));
  std::string line;
  while (std::getline(in, line)) out.push_back(nlohmann::json::parse(line).at("code"));
  return out;
}

bool has_group(const NodePtr& n) {
  bool found = false;
  walk(n, [&](const NodePtr& x) { found = found || x->kind == Kind::Group; });
  return found;
}

}  // namespace

TEST_CASE("reference parser agreement") {
  const auto oracle = test_support::load_json(fixture("syntax_oracle.json"));
  int checked = 0;
  for (const auto& c : oracle.at("cases")) {
    const std::string src = c.at("source");
    CAPTURE(src);
    if (c.at("valid").get<bool>()) {
      CHECK_NOTHROW(parse(src));
      CHECK(count_significant(tokenize(src)) == c.at("tokens").get<std::size_t>());
    } else {
      try {
        parse(src);
        FAIL("accepted invalid source");
      } catch (const ParseError& e) {
        CHECK(e.line() == c.at("line").get<int>());
      }
    }
    ++checked;
  }
  CHECK(checked == 102);
}

TEST_CASE("parse examples") {
  const auto t = parse("x += 1\n");
  REQUIRE(t.module().kids.size() == 1);
  CHECK(t.module().kid(0)->kind == Kind::AugAssign);

  CHECK(parse("").module().kids.empty());

  try {
    parse("return (x + y)");
    FAIL("module-level return accepted");
  } catch (const ParseError& e) {
    CHECK(e.message().find("'return' outside function") != std::string::npos);
    CHECK(e.line() == 1);
    CHECK(e.column() == 0);
  }
}

TEST_CASE("parse error position stays inside the input") {
  for (std::string src : {"x = (1\n", "x = \n", "if x:\npass\n", "x = 'abc"}) {
    CAPTURE(src);
    try {
      parse(src);
      FAIL("accepted");
    } catch (const ParseError& e) {
      const auto lines = 1 + std::count(src.begin(), src.end(), '\n');
      CHECK(e.line() >= 1);
      CHECK(e.line() <= lines);
      CHECK(e.column() >= 0);
    }
  }
}

TEST_CASE("render examples") {
  CHECK(render(parse("flag = condition")) == "flag = condition\n");
  CHECK(render(parse("")) == "");
  CHECK(render(parse("def f(x, y):\n  return x+y\n")) == "def f(x, y):\n    return x + y\n");
  CHECK(render(parse("x=1;y=2\n")) == "x = 1\ny = 2\n");
  CHECK(render(parse("x = (1)\n")) == "x = (1)\n");
  CHECK(render(parse("x = 1  # note\n")) == "x = 1  # note\n");
  CHECK(render(parse("x = (a + b) * c\n")) == "x = (a + b) * c\n");
}

TEST_CASE("render leaves no trailing whitespace") {
  for (const auto& code : corpus_code()) {
    const auto out = render(parse(code));
    CHECK(out.find(" \n") == std::string::npos);
    CHECK(out.find('\t') == std::string::npos);
  }
}

TEST_CASE("normalize examples") {
  CHECK(equivalent_modulo_layout(parse("x=(1)"), parse("x = 1")));
  CHECK(equivalent_modulo_layout(parse("x = 1  # c"), parse("x = 1")));
  CHECK_FALSE(equivalent_modulo_layout(parse("x = x + 1"), parse("x += 1")));
  CHECK_FALSE(has_group(normalize(parse("y = ((a)) + (b * c)")).root()));
}

TEST_CASE("corpus round-trip and idempotence") {
  const auto codes = corpus_code();
  REQUIRE(codes.size() == 50);
  for (const auto& code : codes) {
    CAPTURE(code);
    const auto tree = parse(code);
    const auto once = render(tree);
    const auto reparsed = parse(once);
    CHECK(structurally_equal(normalize(reparsed).root(), normalize(tree).root()));
    CHECK(structurally_equal(reparsed.root(), tree.root()));
    CHECK(render(reparsed) == once);
  }
}

TEST_CASE("group erasure commutes with normalize") {
  for (const auto& code : corpus_code()) {
    const auto n = normalize(parse(code));
    CHECK(structurally_equal(normalize(n).root(), n.root()));
  }
}

TEST_CASE("spans nest inside parents") {
  for (const auto& code : corpus_code()) {
    const auto tree = parse(code);
    std::function<void(const NodePtr&)> check = [&](const NodePtr& n) {
      std::uint32_t prev_end = 0;
      for (const auto& k : n->kids) {
        if (!k || k->span == Span{}) continue;
        CHECK(n->span.contains(k->span));
        CHECK(k->span.begin >= prev_end);
        prev_end = k->span.end;
        check(k);
      }
    };
    check(tree.root());
  }
}
