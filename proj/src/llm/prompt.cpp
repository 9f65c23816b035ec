#include <map>

#include "shortcoder/llm/llm.hpp"

namespace shortcoder::llm {

using rules::RuleId;

namespace {

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
    s.replace(at, from.size(), to);
  }
  return s;
}

std::string hint(RuleId id) {
  if (id == RuleId::R10) {
    return "The program must open a file with open(), read from or write to it, and close it "
           "explicitly with close().";
  }
  return std::string(rules::rule(id).description);
}

std::string trim_block(std::string_view body) {
  if (!body.empty() && body.front() == '\n') body.remove_prefix(1);
  while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.remove_suffix(1);
  // Models like to fence code even inside tags.
  if (body.substr(0, 3) == "```") {
    const auto nl = body.find('\n');
    const auto end = body.rfind("```");
    if (nl != std::string_view::npos && end != std::string_view::npos && end > nl) {
      body = body.substr(nl + 1, end - nl - 1);
      while (!body.empty() && body.back() == '\n') body.remove_suffix(1);
    }
  }
  std::string out(body);
  if (!out.empty()) out += '\n';
  return out;
}

std::string extract(std::string_view text, const PromptTemplate& t, std::string_view name) {
  const std::string open = replace_all(t.delimiter_open, "{}", name);
  const std::string close = replace_all(t.delimiter_close, "{}", name);
  const auto first = text.find(open);
  if (first == std::string_view::npos) throw Rejection("missing " + std::string(name) + " block");
  if (text.find(open, first + open.size()) != std::string_view::npos) {
    throw Rejection("duplicate " + std::string(name) + " block");
  }
  const auto body = first + open.size();
  const auto end = text.find(close, body);
  if (end == std::string_view::npos) throw Rejection("unterminated " + std::string(name) + " block");
  return trim_block(text.substr(body, end - body));
}

}  // namespace

PromptTemplate PromptTemplate::default_template() {
  PromptTemplate t;
  t.system_role =
      "You are an expert Python programmer. You write short, idiomatic code and never change "
      "what a program does.";
  t.task_description =
      "Write one short, self-contained Python program that simplification rule {rule_id} "
      "({rule_name}) can shorten, followed by the simplified version of the same program. "
      "{rule_hint} Both versions must behave identically. Put the original program inside an "
      "original block and the simplified program inside a simplified block, delimited exactly "
      "as in the example, and nothing else inside those blocks.";
  for (const auto& r : rules::catalog()) {
    t.rules.push_back(std::string(rules::to_string(r.id)) + " " + std::string(r.name) + ": " +
                      std::string(r.description));
  }
  t.example_original =
      "if condition:\n    flag = True\nelse:\n    flag = False\n";
  t.example_simplified = "flag = condition\n";
  return t;
}

std::string wrap(const PromptTemplate& t, std::string_view name, std::string_view body) {
  std::string b(body);
  while (!b.empty() && b.back() == '\n') b.pop_back();
  return replace_all(t.delimiter_open, "{}", name) + "\n" + b + "\n" +
         replace_all(t.delimiter_close, "{}", name);
}

std::string build_prompt(const PromptTemplate& t, RuleId target) {
  std::string task = t.task_description;
  task = replace_all(task, "{rule_id}", rules::to_string(target));
  task = replace_all(task, "{rule_name}", rules::rule(target).name);
  task = replace_all(task, "{rule_hint}", hint(target));

  std::string rules_text;
  for (const auto& line : t.rules) rules_text += line + "\n";

  const std::string example =
      wrap(t, "original", t.example_original) + "\n" + wrap(t, "simplified", t.example_simplified);
  return wrap(t, "system", t.system_role) + "\n\n" + wrap(t, "task", task) + "\n\n" +
         wrap(t, "rules", rules_text) + "\n\n" + wrap(t, "example", example) + "\n";
}

ParsedPair parse_response(std::string_view text, const PromptTemplate& t) {
  ParsedPair p;
  p.original = extract(text, t, "original");
  p.simplified = extract(text, t, "simplified");
  return p;
}

}  // namespace shortcoder::llm
