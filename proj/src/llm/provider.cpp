#include <cstdlib>

#include "shortcoder/equivalence/equivalence.hpp"
#include "shortcoder/llm/llm.hpp"
#include "shortcoder/syntax/syntax.hpp"

namespace shortcoder::llm {

using rules::RuleId;

namespace {

struct Reference {
  const char* original;
  const char* simplified;
};

// One hand-made pair per rule, R1..R10.
constexpr Reference kReference[] = {
    {"a = 0\nb = 0\nc = 0\n", "a = b = c = 0\n"},
    {"def add(x, y):\n    return (x + y)\n", "def add(x, y):\n    return x + y\n"},
    {"x = x + 1\n", "x += 1\n"},
    {"if condition:\n    flag = True\nelse:\n    flag = False\n", "flag = condition\n"},
    {"if condition1:\n    result = 'A'\nelse:\n    if condition2:\n        result = 'B'\n    else:\n"
     "        result = 'C'\n",
     "if condition1:\n    result = 'A'\nelif condition2:\n    result = 'B'\nelse:\n    result = 'C'\n"},
    {"result = []\nfor x in data:\n    result.append(x * 2)\n", "result = [x * 2 for x in data]\n"},
    {"del a\ndel b\ndel c\n", "del a, b, c\n"},
    {"if key in dictionary:\n    value = dictionary[key]\nelse:\n    value = default\n",
     "value = dictionary.get(key, default)\n"},
    {"msg = \"Hello \" + name + \"!\"\n", "msg = \"Hello {}!\".format(name)\n"},
    {"f = open('file.txt', 'r')\ndata = f.read()\nf.close()\n",
     "with open('file.txt', 'r') as f:\n    data = f.read()\n"},
};

}  // namespace

MockProvider::MockProvider(std::vector<std::string> responses) : responses_(std::move(responses)) {
  if (responses_.empty()) throw std::invalid_argument("mock provider needs at least one response");
}

MockProvider MockProvider::for_rule(RuleId id) {
  const Reference& r = kReference[static_cast<std::size_t>(id) - 1];
  const PromptTemplate t = PromptTemplate::default_template();
  return MockProvider({"Here is a pair for " + std::string(rules::to_string(id)) + ".\n\n" +
                       wrap(t, "original", r.original) + "\n" + wrap(t, "simplified", r.simplified) +
                       "\n"});
}

std::string MockProvider::complete(const std::vector<Message>&, long seed, int attempt) const {
  const auto n = static_cast<long>(responses_.size());
  const long i = ((seed + attempt) % n + n) % n;
  return responses_[static_cast<std::size_t>(i)];
}

void ProviderConfig::validate() const {
  if (max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
  if (temperature < 0) throw std::invalid_argument("temperature must be non-negative");
}

ProviderConfig ProviderConfig::from_env() {
  ProviderConfig c;
  if (const char* e = std::getenv("SHORTCODER_LLM_ENDPOINT")) c.endpoint = e;
  return c;
}

namespace {

std::string canonical(const std::string& code) { return syntax::render(syntax::parse(code)); }

// Empty string when accepted, otherwise the rejection reason.
std::string vet(const ParsedPair& p, RuleId target, rules::Strictness strictness) {
  std::optional<syntax::SyntaxTree> original;
  try {
    original = syntax::parse(p.original);
  } catch (const syntax::ParseError& e) {
    return std::string("parse error in original: ") + e.what();
  }
  std::optional<syntax::SyntaxTree> simplified;
  try {
    simplified = syntax::parse(p.simplified);
  } catch (const syntax::ParseError& e) {
    return std::string("parse error in simplified: ") + e.what();
  }
  // Canonical text keeps grouping parentheses, so an R2 pair is not identical.
  if (syntax::render(*original) == syntax::render(*simplified)) return "identical pair";
  rules::RuleConfig config;
  config.enabled = {target};
  config.strictness = strictness;
  if (rules::apply_rule(*original, target, config).fired.empty()) {
    return std::string(rules::to_string(target)) + " does not fire on the original";
  }
  const auto verdict = equivalence::check_static(p.original, p.simplified);
  if (verdict.status == equivalence::Status::Inequivalent) return "static check: " + verdict.detail;
  return {};
}

}  // namespace

Synthesis synthesize_pair(const ChatProvider& provider, const ProviderConfig& config, RuleId target,
                          long seed, const PromptTemplate& t, rules::Strictness strictness) {
  config.validate();
  const std::vector<Message> messages = {{"system", t.system_role},
                                         {"user", build_prompt(t, target)}};
  Synthesis s;
  bool transport_failed = false;
  std::string transport_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    ++s.attempts;
    std::string body;
    try {
      body = provider.complete(messages, seed, attempt);
      transport_failed = false;
    } catch (const TransportError& e) {
      transport_failed = true;
      transport_error = e.what();
      s.rejections.push_back(std::string("transport: ") + e.what());
      continue;
    }
    ParsedPair parsed;
    try {
      parsed = parse_response(body, t);
    } catch (const Rejection& e) {
      s.rejections.push_back(e.what());
      continue;
    }
    if (std::string why = vet(parsed, target, strictness); !why.empty()) {
      s.rejections.push_back(std::move(why));
      continue;
    }
    dataset::CodePair p;
    p.source_task_id = "llm-" + std::string(rules::to_string(target)) + "-" + std::to_string(seed);
    p.mode = dataset::Mode::Llm;
    p.rules_applied = {target};
    p.original_code = canonical(parsed.original);
    p.simplified_code = canonical(parsed.simplified);
    p.validated = dataset::Validation::Static;
    dataset::finalize(p);
    s.pair = std::move(p);
    return s;
  }
  if (transport_failed) throw TransportError(transport_error);
  return s;
}

}  // namespace shortcoder::llm
