#include <array>

#include "rule_impl.hpp"

namespace shortcoder::rules::detail {

using namespace syntax;

namespace {

// R1: a = V; b = V  ->  a = b = V
class MultiAssign final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness) const override {
    const auto first = value_of(stmts[i]);
    if (!first) return std::nullopt;
    std::set<std::string> seen;
    if (!add_targets(*stmts[i], seen)) return std::nullopt;
    std::size_t j = i + 1;
    while (j < stmts.size()) {
      const auto v = value_of(stmts[j]);
      if (!v || !same(*v, *first) || !add_targets(*stmts[j], seen)) break;
      ++j;
    }
    if (j - i < 2) return std::nullopt;
    Match m;
    m.consumed = j - i;
    m.parts.assign(stmts.begin() + static_cast<std::ptrdiff_t>(i),
                   stmts.begin() + static_cast<std::ptrdiff_t>(j));
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    std::vector<NodePtr> kids;
    for (const auto& s : m.parts) {
      for (std::size_t t = 0; t + 1 < s->kids.size(); ++t) kids.push_back(s->kids[t]);
    }
    kids.push_back(m.parts.front()->kids.back());
    return {keep_leading_comments(stmt(Kind::Assign, std::move(kids)), m.parts.front())};
  }

 private:
  static std::optional<NodePtr> value_of(const NodePtr& s) {
    if (s->kind != Kind::Assign) return std::nullopt;
    for (std::size_t t = 0; t + 1 < s->kids.size(); ++t) {
      if (!is_name(s->kids[t])) return std::nullopt;
    }
    if (!immutable_literal(s->kids.back())) return std::nullopt;
    return s->kids.back();
  }

  static bool add_targets(const Node& s, std::set<std::string>& seen) {
    for (std::size_t t = 0; t + 1 < s.kids.size(); ++t) {
      if (!seen.insert(s.kids[t]->text).second) return false;
    }
    return true;
  }
};

// R2: return (E)  ->  return E
class ReturnParens final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness) const override {
    const NodePtr& s = stmts[i];
    if (s->kind != Kind::Return || s->kid(0)->kind != Kind::Group) return std::nullopt;
    const NodePtr& inner = strip_groups(s->kid(0));
    switch (inner->kind) {
      case Kind::Yield:
      case Kind::YieldFrom:
      case Kind::NamedExpr:
      case Kind::Starred:
        return std::nullopt;
      default:
        break;
    }
    Match m;
    m.parts = {s, inner};
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    return {with_kids(*m.parts[0], {m.parts[1]})};
  }
};

// R3: x = x op y  ->  x op= y
class AugmentedAssign final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness strictness) const override {
    const auto a = simple_assign(stmts[i]);
    if (!a) return std::nullopt;
    const auto& [target, value] = *a;
    const std::string base = base_name(target, strictness);
    if (base.empty()) return std::nullopt;
    const NodePtr& rhs = strip_groups(value);
    if (rhs->kind != Kind::BinOp || !augmentable(rhs->text)) return std::nullopt;
    if (!same(strip_groups(rhs->kid(0)), target)) return std::nullopt;
    const NodePtr& y = strip_groups(rhs->kid(1));
    if (mentions(y, base)) return std::nullopt;
    Match m;
    m.parts = {stmts[i], target, y};
    m.variant = 0;
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    const std::string op = strip_groups(m.parts[0]->kids.back())->text + "=";
    NodePtr aug = stmt(Kind::AugAssign, {m.parts[1], m.parts[2]}, op);
    return {with_trivia(*aug, m.parts[0]->trivia)};
  }

 private:
  static bool augmentable(const std::string& op) {
    static constexpr std::array<std::string_view, 12> ops = {
        "+", "-", "*", "/", "//", "%", "**", "<<", ">>", "&", "|", "^"};
    for (auto o : ops) {
      if (op == o) return true;
    }
    return false;
  }

  // The variable the target is rooted at, or "" if the target is not allowed.
  static std::string base_name(const NodePtr& target, Strictness strictness) {
    if (target->kind == Kind::Name) return target->text;
    if (strictness == Strictness::Strict) return {};
    if (target->kind == Kind::Attribute || target->kind == Kind::Subscript) {
      const NodePtr& base = target->kid(0);
      if (base->kind != Kind::Name) return {};
      if (target->kind == Kind::Subscript && !effect_free(target->kid(1))) return {};
      return base->text;
    }
    return {};
  }
};

const NodePtr* sole_statement(const NodePtr& block) {
  return block->kids.size() == 1 ? &block->kids.front() : nullptr;
}

// R4: if C: v = A / else: v = B  ->  v = A if C else B
class ConditionalAssign final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness) const override {
    const NodePtr& s = stmts[i];
    if (s->kind != Kind::If || s->kid(2)->kind != Kind::Else) return std::nullopt;
    const NodePtr* body = sole_statement(s->kid(1));
    const NodePtr* orelse = sole_statement(s->kid(2)->kid(0));
    if (!body || !orelse) return std::nullopt;
    const auto a = simple_assign(*body);
    const auto b = simple_assign(*orelse);
    if (!a || !b || !is_name(a->first) || !same(a->first, b->first)) return std::nullopt;
    Match m;
    m.parts = {s, a->first, s->kid(0), a->second, b->second};
    const bool true_false = is_constant(a->second, "True") && is_constant(b->second, "False");
    m.variant = true_false ? 1 : 0;
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness strictness) const override {
    const NodePtr& target = m.parts[1];
    const NodePtr& test = m.parts[2];
    NodePtr value;
    if (m.variant == 1) {
      value = strictness == Strictness::Strict
                  ? expr(Kind::Call, {make_name("bool"), strip_groups(test)})
                  : test;
    } else {
      value = expr(Kind::IfExp, {m.parts[3], test, m.parts[4]});
    }
    return {keep_leading_comments(stmt(Kind::Assign, {target, value}), m.parts[0])};
  }

 private:
  static bool is_constant(const NodePtr& n, std::string_view v) {
    const NodePtr& s = strip_groups(n);
    return s->kind == Kind::Constant && s->text == v;
  }
};

// R5: else: if ...  ->  elif ...
class ElifChain final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness) const override {
    const NodePtr& s = stmts[i];
    if (s->kind != Kind::If || !nested_else_if(s)) return std::nullopt;
    Match m;
    m.parts = {s};
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    return {flatten(m.parts[0])};
  }

 private:
  static const NodePtr* else_if(const NodePtr& orelse) {
    if (orelse->kind != Kind::Else) return nullptr;
    const NodePtr* only = sole_statement(orelse->kid(0));
    return only && (*only)->kind == Kind::If ? only : nullptr;
  }

  static bool nested_else_if(const NodePtr& s) {
    const NodePtr& orelse = s->kid(2);
    if (else_if(orelse)) return true;
    return orelse->kind == Kind::If && nested_else_if(orelse);
  }

  static NodePtr flatten(const NodePtr& s) {
    const NodePtr& orelse = s->kid(2);
    NodePtr next = orelse;
    if (const NodePtr* inner = else_if(orelse)) {
      next = flatten(*inner);
    } else if (orelse->kind == Kind::If) {
      next = flatten(orelse);
    }
    if (next == orelse) return s;
    return with_kids(*s, {s->kid(0), s->kid(1), next});
  }
};

// R7: del a; del b  ->  del a, b
class MergeDel final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness) const override {
    std::size_t j = i;
    while (j < stmts.size() && stmts[j]->kind == Kind::Delete && stmts[j]->kids.size() == 1) ++j;
    if (j - i < 2) return std::nullopt;
    Match m;
    m.consumed = j - i;
    m.parts.assign(stmts.begin() + static_cast<std::ptrdiff_t>(i),
                   stmts.begin() + static_cast<std::ptrdiff_t>(j));
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    std::vector<NodePtr> targets;
    for (const auto& s : m.parts) targets.push_back(s->kid(0));
    return {keep_leading_comments(stmt(Kind::Delete, std::move(targets)), m.parts.front())};
  }
};

}  // namespace

std::unique_ptr<RuleImpl> make_r1() { return std::make_unique<MultiAssign>(); }
std::unique_ptr<RuleImpl> make_r2() { return std::make_unique<ReturnParens>(); }
std::unique_ptr<RuleImpl> make_r3() { return std::make_unique<AugmentedAssign>(); }
std::unique_ptr<RuleImpl> make_r4() { return std::make_unique<ConditionalAssign>(); }
std::unique_ptr<RuleImpl> make_r5() { return std::make_unique<ElifChain>(); }
std::unique_ptr<RuleImpl> make_r7() { return std::make_unique<MergeDel>(); }

}  // namespace shortcoder::rules::detail
