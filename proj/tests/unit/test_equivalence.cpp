#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../../src/equivalence/subprocess.hpp"
#include "shortcoder/equivalence/equivalence.hpp"
#include "support.hpp"

using namespace shortcoder::equivalence;
using test_support::fixture;
using test_support::slurp;

namespace {

bool have_python() { return std::string(SHORTCODER_PYTHON).size() > 0; }

RunnerSpec stub(int timeout_ms = 5000) {
  RunnerSpec r;
  r.command = {SHORTCODER_PYTHON, fixture("stub_runner.py").string()};
  r.timeout_ms = timeout_ms;
  return r;
}

}  // namespace

TEST_CASE("static examples") {
  const std::string s = "def f(a, b):\n    return a + b * 2\n";
  CHECK(check_static(s, "def f(a, b):\n    return (a + (b * 2))\n").status == Status::Equivalent);
  CHECK(check_static(s, "def f(a, b):  # sum\n    return a + b * 2\n").status ==
        Status::Equivalent);

  const auto aug = check_static("x = x + 1", "x += 1");
  CHECK(aug.status == Status::Inconclusive);
  CHECK(aug.detail == "needs dynamic check");

  const auto broken = check_static("x = 1", "x = ");
  CHECK(broken.status == Status::Inequivalent);
  CHECK(broken.detail.find("parse error in simplified") == 0);
  CHECK(check_static("x = ", "x = 1").status == Status::Inequivalent);
  CHECK(check_static("x = ", "y = ").status == Status::Inconclusive);

  const auto leaked = check_static("x = a", "x = b");
  CHECK(leaked.status == Status::Inequivalent);
  CHECK(leaked.detail == "new name: b");
  CHECK(check_static("if c:\n    f = True\nelse:\n    f = False\n", "f = bool(c)\n").status ==
        Status::Inconclusive);
  // Semantically distinct trees are never called equivalent.
  CHECK(check_static("x = a - b", "x = b - a").status != Status::Equivalent);
}

TEST_CASE("runner spec") {
  CHECK(RunnerSpec::split_command("python3 'my runner.py' -q") ==
        std::vector<std::string>{"python3", "my runner.py", "-q"});
  CHECK(RunnerSpec::split_command("  a  \"b c\"d ") == std::vector<std::string>{"a", "b cd"});
  CHECK(RunnerSpec::split_command("").empty());

  RunnerSpec r;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r.command = {"x"};
  CHECK_NOTHROW(r.validate());
  r.timeout_ms = 99;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r.timeout_ms = 100;
  r.max_parallel = 0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  CHECK(RunnerSpec{}.timeout_ms == 5000);
  CHECK(RunnerSpec{}.max_parallel == 4);
}

TEST_CASE("wire protocol encoding") {
  CHECK(encode_request("x = 1\n", {"assert x == 1"}, 250) ==
        R"({"code":"x = 1\n","tests":["assert x == 1"],"timeout_ms":250})");

  const auto r = decode_response(
      R"({"results":[{"test":"t1","status":"pass","error_class":null},)"
      R"({"test":"t2","status":"error","error_class":"NameError"}],"elapsed_ms":12})");
  REQUIRE(r.results.size() == 2);
  CHECK(r.results[0].status == "pass");
  CHECK_FALSE(r.results[0].error_class.has_value());
  CHECK(r.results[1].error_class == "NameError");
  CHECK(r.elapsed_ms == 12);

  CHECK_THROWS_AS(decode_response("nope"), std::runtime_error);
  CHECK_THROWS_AS(decode_response(R"({"results":[{"test":"t","status":"maybe","error_class":null}],"elapsed_ms":1})"),
                  std::runtime_error);
  CHECK_THROWS_AS(decode_response(R"({"elapsed_ms":1})"), std::runtime_error);
}

TEST_CASE("runner: pass, fail and import-time error") {
  if (!have_python()) return;
  const std::string code = "def f(x):\n    return x + 1";
  auto ok = run_variant(code, {"assert f(1) == 2"}, stub());
  REQUIRE(ok.response);
  CHECK(ok.response->results.at(0).status == "pass");

  auto bad = run_variant(code, {"assert f(1) == 3"}, stub());
  REQUIRE(bad.response);
  CHECK(bad.response->results.at(0).status == "fail");
  CHECK_FALSE(bad.response->results.at(0).error_class.has_value());

  auto broken = run_variant("undefined_name\n", {"assert True", "assert 1"}, stub());
  REQUIRE(broken.response);
  for (const auto& r : broken.response->results) {
    CHECK(r.status == "error");
    CHECK(r.error_class == "NameError");
  }
}

TEST_CASE("runner: ordering, isolation, timeout") {
  if (!have_python()) return;
  auto first = run_variant("state = [1]\n", {"state.append(2)", "assert state == [1, 2]"}, stub());
  REQUIRE(first.response);
  CHECK(first.response->results[0].test == "state.append(2)");
  CHECK(first.response->results[1].status == "pass");
  auto second = run_variant("", {"assert 'state' not in globals()"}, stub());
  REQUIRE(second.response);
  CHECK(second.response->results[0].status == "pass");

  auto slow = run_variant("import time\n", {"time.sleep(5)", "assert True"}, stub(200));
  REQUIRE(slow.response);
  CHECK(slow.response->results[0].error_class == "Timeout");
  CHECK(slow.response->results[1].status == "pass");
}

TEST_CASE("runner: malformed request") {
  if (!have_python()) return;
  const std::vector<std::string> argv = {SHORTCODER_PYTHON, fixture("stub_runner.py").string()};
  for (std::string req : {"not json", "[]", R"({"code": 1, "tests": [], "timeout_ms": 10})",
                          R"({"code": "", "tests": [1], "timeout_ms": 10})",
                          R"({"code": "", "tests": [], "timeout_ms": 0})"}) {
    CAPTURE(req);
    const auto p = detail::run_process(argv, req, 5000);
    CHECK(p.exit_code == 2);
    CHECK(nlohmann::json::parse(p.out).contains("error"));
  }
}

TEST_CASE("dynamic: figure pairs") {
  if (!have_python()) return;
  const std::string before = slurp(fixture("figures/r8_dict_get.before.py"));
  const std::string after = slurp(fixture("figures/r8_dict_get.after.py"));
  const std::string prelude = "dictionary = {'a': 1}\ndefault = 0\n";
  const std::vector<std::string> tests = {"assert value == 1"};
  CHECK(check_dynamic(prelude + "key = 'a'\n" + before, prelude + "key = 'a'\n" + after, tests, stub())
            .status == Status::Equivalent);
  CHECK(check_dynamic(prelude + "key = 'z'\n" + before, prelude + "key = 'z'\n" + after,
                      {"assert value == 0"}, stub())
            .status == Status::Equivalent);
}

TEST_CASE("dynamic: truthiness counterexample") {
  if (!have_python()) return;
  const std::string before = "condition = 5\nif condition:\n    flag = True\nelse:\n    flag = False\n";
  const std::string after = "condition = 5\nflag = condition\n";
  const auto v = check_dynamic(before, after, {"assert condition == 5", "assert flag is True"}, stub());
  CHECK(v.status == Status::Inequivalent);
  CHECK(v.detail == "assert flag is True");
  // Strict output keeps the stored value boolean.
  CHECK(check_dynamic(before, "condition = 5\nflag = bool(condition)\n", {"assert flag is True"},
                      stub())
            .status == Status::Equivalent);
}

TEST_CASE("dynamic: verdict reasons") {
  CHECK(check_dynamic("x = 1", "x = 1", {}, stub()).detail == "no tests");

  RunnerSpec missing;
  missing.command = {"/nonexistent/runner"};
  const auto gone = check_dynamic("x = 1", "x = 1", {"assert x"}, missing);
  CHECK(gone.status == Status::Inconclusive);
  CHECK(gone.detail == "runner unavailable");

  if (!have_python()) return;
  const auto t = check_dynamic("import time", "import time", {"time.sleep(5)"}, stub(200));
  CHECK(t.status == Status::Inconclusive);
  CHECK(t.detail == "timeout: time.sleep(5)");

  const auto fails = check_dynamic("x = 1", "x = 1", {"assert x == 2"}, stub());
  CHECK(fails.status == Status::Inconclusive);
  CHECK(fails.detail == "original fails: assert x == 2");

  // Same error class, different messages.
  CHECK(check_dynamic("def f():\n    raise ValueError('a')", "def f():\n    raise ValueError('b')",
                      {"f()"}, stub())
            .status == Status::Inconclusive);
  CHECK(check_dynamic("def f():\n    raise ValueError('a')", "def f():\n    raise KeyError('a')",
                      {"f()"}, stub())
            .status == Status::Inequivalent);

  RunnerSpec liar;
  liar.command = {SHORTCODER_PYTHON, "-c", "print('garbage')"};
  const auto h = check_dynamic("x = 1", "x = 1", {"assert x"}, liar);
  CHECK(h.status == Status::Inconclusive);
  CHECK(h.detail.rfind("harness failure", 0) == 0);
}

TEST_CASE("batch keeps input order") {
  if (!have_python()) return;
  std::vector<BatchItem> items;
  for (int i = 0; i < 8; ++i) {
    const std::string v = std::to_string(i);
    items.push_back({"x = " + v, i % 2 ? "x = -1" : "x = " + v, {"assert x == " + v}});
  }
  auto runner = stub();
  runner.max_parallel = 3;
  const auto out = check_batch(items, runner);
  REQUIRE(out.size() == items.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].status == (i % 2 ? Status::Inequivalent : Status::Equivalent));
  }
}
