#include <cctype>
#include <stdexcept>
#include <string>

#include "rule_impl.hpp"

namespace shortcoder::rules {

using namespace syntax;
using detail::Frame;
using detail::Match;
using detail::RuleImpl;
using detail::Scope;

namespace {

constexpr std::array<Rule, 10> kCatalog = {{
    {RuleId::R1, "multi-assignment", Safety::Guarded,
     "Consecutive assignments of the same immutable literal to several names become one chained "
     "assignment: `a = 0; b = 0` -> `a = b = 0`."},
    {RuleId::R2, "return-parentheses", Safety::AlwaysSafe,
     "Redundant parentheses around a returned expression are dropped: `return (x + y)` -> "
     "`return x + y`."},
    {RuleId::R3, "augmented-assignment", Safety::Guarded,
     "`x = x <op> y` becomes `x <op>= y` for arithmetic, shift and bitwise operators."},
    {RuleId::R4, "conditional-assignment", Safety::Guarded,
     "An if/else whose branches each assign one value to the same variable becomes a single "
     "assignment of a conditional expression."},
    {RuleId::R5, "elif-chain", Safety::AlwaysSafe,
     "An else block holding only another if statement is rewritten as an elif chain."},
    {RuleId::R6, "comprehension", Safety::Guarded,
     "An empty list or dict followed by a loop that only appends or stores into it becomes a "
     "list or dict comprehension."},
    {RuleId::R7, "merge-del", Safety::AlwaysSafe,
     "Consecutive single-target del statements are merged into one: `del a; del b` -> "
     "`del a, b`."},
    {RuleId::R8, "dict-get", Safety::Guarded,
     "A membership test that reads a dict key or falls back to a default becomes "
     "`d.get(k, default)`."},
    {RuleId::R9, "str-format", Safety::Guarded,
     "A `+` chain mixing string literals and expressions becomes one literal with `{}` "
     "placeholders and a `.format(...)` call."},
    {RuleId::R10, "with-open", Safety::Guarded,
     "`f = open(...)` ... `f.close()` becomes a `with open(...) as f:` block around the "
     "statements in between."},
}};

Span run_span(const std::vector<NodePtr>& stmts, std::size_t i, std::size_t n) {
  return Span{stmts[i]->span.begin, stmts[i + n - 1]->span.end};
}

std::size_t count_rendered(const std::string& text) {
  return count_significant(tokenize(text));
}

std::size_t stmt_tokens(const std::vector<NodePtr>& stmts) {
  return count_rendered(render(make_node(Kind::Module, stmts)));
}

std::size_t expr_tokens(const NodePtr& e) { return count_rendered(render_expression(e)); }

bool is_expression(Kind k) {
  switch (k) {
    case Kind::Name:
    case Kind::Number:
    case Kind::String:
    case Kind::StringConcat:
    case Kind::Constant:
    case Kind::Group:
    case Kind::Tuple:
    case Kind::List:
    case Kind::Set:
    case Kind::Dict:
    case Kind::ListComp:
    case Kind::SetComp:
    case Kind::GeneratorExp:
    case Kind::DictComp:
    case Kind::BinOp:
    case Kind::UnaryOp:
    case Kind::BoolOp:
    case Kind::Compare:
    case Kind::IfExp:
    case Kind::Lambda:
    case Kind::NamedExpr:
    case Kind::Yield:
    case Kind::YieldFrom:
    case Kind::Await:
    case Kind::Call:
    case Kind::Attribute:
    case Kind::Subscript:
      return true;
    default:
      return false;
  }
}

class Pass {
 public:
  Pass(RuleId id, Strictness strictness)
      : id_(id), rule_(detail::impl(id)), strictness_(strictness) {}

  std::vector<Firing> fired;

  NodePtr visit(const NodePtr& n, const Node* parent) {
    if (n->kind == Kind::Module) return visit_block(n, n.get(), false);
    if (n->kind == Kind::Block) {
      const bool loop = parent && ((parent->kind == Kind::For && parent->kid(2) == n) ||
                                   (parent->kind == Kind::While && parent->kid(1) == n));
      return visit_block(n, parent, loop);
    }
    if (is_expression(n->kind)) {
      if (auto m = rule_.match_expression(n, parent, strictness_)) {
        NodePtr replacement = rule_.rewrite_expression(*m, strictness_);
        if (accept(expr_tokens(n), expr_tokens(replacement))) {
          fired.push_back({id_, n->span});
          return descend(replacement);
        }
      }
    }
    return descend(n);
  }

 private:
  bool accept(std::size_t before, std::size_t after) const {
    return strictness_ == Strictness::PaperFaithful || after < before;
  }

  NodePtr descend(const NodePtr& n) {
    bool changed = false;
    std::vector<NodePtr> kids;
    kids.reserve(n->kids.size());
    for (const auto& k : n->kids) {
      kids.push_back(visit(k, n.get()));
      changed = changed || kids.back() != k;
    }
    return changed ? with_kids(*n, std::move(kids)) : n;
  }

  NodePtr visit_block(const NodePtr& block, const Node* owner, bool loop_body) {
    const auto& stmts = block->kids;
    std::vector<NodePtr> out;
    bool changed = false;
    std::size_t i = 0;
    while (i < stmts.size()) {
      frames_.push_back(Frame{&stmts, i, owner, loop_body});
      std::optional<Match> m = rule_.match_statements(Scope(frames_), stmts, i, strictness_);
      if (m) {
        std::vector<NodePtr> repl = rule_.rewrite_statements(*m, strictness_);
        std::vector<NodePtr> orig(stmts.begin() + static_cast<std::ptrdiff_t>(i),
                                  stmts.begin() + static_cast<std::ptrdiff_t>(i + m->consumed));
        if (accept(stmt_tokens(orig), stmt_tokens(repl))) {
          fired.push_back({id_, run_span(stmts, i, m->consumed)});
          for (const auto& r : repl) out.push_back(descend(r));
          i += m->consumed;
          changed = true;
          frames_.pop_back();
          continue;
        }
      }
      out.push_back(visit(stmts[i], owner));
      changed = changed || out.back() != stmts[i];
      frames_.pop_back();
      ++i;
    }
    return changed ? with_kids(*block, std::move(out)) : block;
  }

  RuleId id_;
  const RuleImpl& rule_;
  Strictness strictness_;
  std::vector<Frame> frames_;
};

}  // namespace

namespace detail {

const RuleImpl& impl(RuleId id) {
  static const std::array<std::unique_ptr<RuleImpl>, 10> rules = {
      make_r1(), make_r2(), make_r3(), make_r4(), make_r5(),
      make_r6(), make_r7(), make_r8(), make_r9(), make_r10()};
  return *rules[static_cast<std::size_t>(id) - 1];
}

}  // namespace detail

std::string_view to_string(RuleId id) {
  static constexpr std::array<std::string_view, 10> names = {"R1", "R2", "R3", "R4", "R5",
                                                             "R6", "R7", "R8", "R9", "R10"};
  return names[static_cast<std::size_t>(id) - 1];
}

std::optional<RuleId> parse_rule_id(std::string_view text) {
  if (text.size() < 2 || (text[0] != 'R' && text[0] != 'r')) return std::nullopt;
  int n = 0;
  for (char c : text.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    n = n * 10 + (c - '0');
    if (n > 10) return std::nullopt;
  }
  if (n < 1 || text[1] == '0') return std::nullopt;
  return static_cast<RuleId>(n);
}

std::string_view to_string(Strictness s) {
  return s == Strictness::Strict ? "strict" : "paper-faithful";
}

std::optional<Strictness> parse_strictness(std::string_view text) {
  if (text == "strict") return Strictness::Strict;
  if (text == "paper-faithful") return Strictness::PaperFaithful;
  return std::nullopt;
}

const std::array<Rule, 10>& catalog() { return kCatalog; }

const Rule& rule(RuleId id) { return kCatalog[static_cast<std::size_t>(id) - 1]; }

void RuleConfig::validate() const {
  if (enabled.empty()) throw std::invalid_argument("no rules enabled");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
}

BudgetExhausted::BudgetExhausted(int iterations)
    : std::runtime_error("rules still firing after " + std::to_string(iterations) + " sweeps"),
      iterations_(iterations) {}

RewriteResult apply_rule(const SyntaxTree& tree, RuleId id, const RuleConfig& config) {
  config.validate();
  if (!config.enabled.count(id)) {
    throw std::invalid_argument(std::string(to_string(id)) + " is not enabled");
  }
  // Passes repeat until the rule stops firing: a rewrite can expose a new
  // site around it (an inner R4 turning the enclosing else into a match).
  // Spans of later passes refer to the text rendered by the previous one.
  RewriteResult result{tree, {}, 0};
  for (int pass_no = 1; pass_no <= config.max_iterations; ++pass_no) {
    result.iterations = pass_no;
    Pass pass(id, config.strictness);
    NodePtr root = pass.visit(result.tree.root(), nullptr);
    if (pass.fired.empty()) return result;
    result.fired.insert(result.fired.end(), pass.fired.begin(), pass.fired.end());
    // Re-parse so spans describe the rendered text.
    result.tree = parse(render(root));
  }
  throw BudgetExhausted(config.max_iterations);
}

std::set<RuleId> applicable_rules(const SyntaxTree& tree, const RuleConfig& config) {
  config.validate();
  std::set<RuleId> out;
  for (RuleId id : config.enabled) {
    if (!apply_rule(tree, id, config).fired.empty()) out.insert(id);
  }
  return out;
}

RewriteResult simplify_joint(const SyntaxTree& tree, const RuleConfig& config) {
  config.validate();
  RewriteResult result{tree, {}, 0};
  for (int sweep = 1; sweep <= config.max_iterations; ++sweep) {
    result.iterations = sweep;
    bool any = false;
    for (RuleId id : config.enabled) {
      RewriteResult step = apply_rule(result.tree, id, config);
      if (step.fired.empty()) continue;
      any = true;
      result.tree = std::move(step.tree);
      result.fired.insert(result.fired.end(), step.fired.begin(), step.fired.end());
    }
    if (!any) return result;
  }
  throw BudgetExhausted(config.max_iterations);
}

std::vector<std::pair<RuleId, RewriteResult>> simplify_independent(const SyntaxTree& tree,
                                                                   const RuleConfig& config) {
  config.validate();
  std::vector<std::pair<RuleId, RewriteResult>> out;
  for (RuleId id : config.enabled) {
    RewriteResult r = apply_rule(tree, id, config);
    if (r.fired.empty() || structurally_equal(r.tree.root(), tree.root())) continue;
    out.emplace_back(id, std::move(r));
  }
  return out;
}

}  // namespace shortcoder::rules
