#include "rule_impl.hpp"

namespace shortcoder::rules::detail {

using namespace syntax;

namespace {

bool name_target(const NodePtr& t, std::vector<std::string>& names) {
  switch (t->kind) {
    case Kind::Name:
      names.push_back(t->text);
      return true;
    case Kind::Group:
    case Kind::Starred:
      return name_target(t->kid(0), names);
    case Kind::Tuple:
    case Kind::List:
      for (const auto& e : t->kids) {
        if (!name_target(e, names)) return false;
      }
      return !t->kids.empty();
    default:
      return false;
  }
}

bool has_slice(const NodePtr& index) {
  if (index->kind == Kind::Slice) return true;
  if (index->kind == Kind::Tuple) {
    for (const auto& e : index->kids) {
      if (e->kind == Kind::Slice) return true;
    }
  }
  return false;
}

// R6: r = [] / for t in I: r.append(E)  ->  r = [E for t in I]
// and the dict form r = {} / for t in I: r[K] = V  ->  r = {K: V for t in I}.
class Comprehension final : public RuleImpl {
 public:
  enum Variant { kList = 0, kDict = 1 };

  std::optional<Match> match_statements(const Scope& scope, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness strictness) const override {
    if (i + 1 >= stmts.size()) return std::nullopt;
    const auto init = simple_assign(stmts[i]);
    if (!init || !is_name(init->first)) return std::nullopt;
    const std::string r = init->first->text;
    const Kind container = init->second->kind;
    if ((container != Kind::List && container != Kind::Dict) || !init->second->kids.empty()) {
      return std::nullopt;
    }
    const NodePtr& loop = stmts[i + 1];
    if (loop->kind != Kind::For || loop->is_async || !loop->kid(3)->empty()) return std::nullopt;
    const auto& body = loop->kid(2)->kids;
    if (body.size() != 1) return std::nullopt;

    NodePtr inner = body.front();
    NodePtr cond;
    if (inner->kind == Kind::If && inner->kid(2)->empty() && inner->kid(1)->kids.size() == 1) {
      cond = inner->kid(0);
      inner = inner->kid(1)->kids.front();
    }

    Match m;
    m.consumed = 2;
    std::vector<NodePtr> pieces;
    if (container == Kind::List) {
      const auto e = appended(inner, r);
      if (!e) return std::nullopt;
      m.variant = kList;
      pieces = {*e};
    } else {
      const auto a = simple_assign(inner);
      if (!a || a->first->kind != Kind::Subscript || !is_name(a->first->kid(0), r) ||
          has_slice(a->first->kid(1))) {
        return std::nullopt;
      }
      m.variant = kDict;
      pieces = {a->first->kid(1), a->second};
      // The loop stores V before evaluating K; the comprehension does K first.
      if (strictness == Strictness::Strict && !effect_free(pieces[0]) &&
          !effect_free(pieces[1])) {
        return std::nullopt;
      }
    }

    const NodePtr& target = loop->kid(0);
    const NodePtr& iter = loop->kid(1);
    std::vector<std::string> loop_names;
    if (!name_target(target, loop_names)) return std::nullopt;

    std::vector<NodePtr> checked = pieces;
    checked.push_back(target);
    checked.push_back(iter);
    if (cond) checked.push_back(cond);
    for (const auto& n : checked) {
      if (mentions(n, r)) return std::nullopt;
      if (contains_kind(n, {Kind::Yield, Kind::YieldFrom, Kind::Await, Kind::NamedExpr})) {
        return std::nullopt;
      }
    }

    if (strictness == Strictness::Strict) {
      // Class bodies are invisible from comprehension scopes, and a
      // comprehension does not leak its loop variables.
      if (scope.scope_kind() == Kind::ClassDef) return std::nullopt;
      for (const auto& name : loop_names) {
        if (scope.mentioned_later(2, name)) return std::nullopt;
      }
    }

    m.parts = {stmts[i], init->first, target, iter, cond ? cond : make_empty()};
    m.parts.insert(m.parts.end(), pieces.begin(), pieces.end());
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    std::vector<NodePtr> comp{m.parts[2], m.parts[3]};
    if (!m.parts[4]->empty()) comp.push_back(m.parts[4]);
    NodePtr generator = expr(Kind::Comprehension, std::move(comp));
    NodePtr value;
    if (m.variant == kList) {
      value = expr(Kind::ListComp, {m.parts[5], generator});
    } else {
      value = expr(Kind::DictComp, {expr(Kind::DictItem, {m.parts[5], m.parts[6]}), generator});
    }
    return {keep_leading_comments(stmt(Kind::Assign, {m.parts[1], value}), m.parts[0])};
  }

 private:
  static std::optional<NodePtr> appended(const NodePtr& s, const std::string& r) {
    if (s->kind != Kind::ExprStmt) return std::nullopt;
    const NodePtr& call = s->kid(0);
    if (call->kind != Kind::Call || call->kids.size() != 2) return std::nullopt;
    const NodePtr& func = call->kid(0);
    if (func->kind != Kind::Attribute || func->text != "append" || !is_name(func->kid(0), r)) {
      return std::nullopt;
    }
    const NodePtr& arg = call->kid(1);
    switch (arg->kind) {
      case Kind::Starred:
      case Kind::DoubleStarred:
      case Kind::Keyword:
        return std::nullopt;
      default:
        return arg;
    }
  }
};

// R10: f = open(...) ... f.close()  ->  with open(...) as f: ...
class WithOpen final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope& scope, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness strictness) const override {
    const auto a = simple_assign(stmts[i]);
    if (!a || !is_name(a->first)) return std::nullopt;
    const NodePtr& call = a->second;
    if (call->kind != Kind::Call || !is_name(call->kid(0), "open")) return std::nullopt;
    const std::string f = a->first->text;

    std::size_t j = i + 1;
    for (; j < stmts.size(); ++j) {
      if (closes(stmts[j], f)) break;
      if (binds(stmts[j], f)) return std::nullopt;
    }
    if (j >= stmts.size() || j < i + 2) return std::nullopt;
    if (scope.mentioned_later(j - i + 1, f)) return std::nullopt;

    std::vector<NodePtr> between(stmts.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                 stmts.begin() + static_cast<std::ptrdiff_t>(j));
    if (strictness == Strictness::Strict) {
      for (const auto& s : between) {
        if (contains_kind_in_scope(s, {Kind::Return, Kind::Yield, Kind::YieldFrom, Kind::Break,
                                       Kind::Continue})) {
          return std::nullopt;
        }
      }
    }

    Match m;
    m.consumed = j - i + 1;
    m.parts = {stmts[i], a->first, call};
    m.parts.insert(m.parts.end(), between.begin(), between.end());
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    std::vector<NodePtr> body(m.parts.begin() + 3, m.parts.end());
    NodePtr item = make_node(Kind::WithItem, {m.parts[2], m.parts[1]});
    NodePtr with = stmt(Kind::With, {item, block(std::move(body))});
    return {keep_leading_comments(with, m.parts[0])};
  }

 private:
  static bool closes(const NodePtr& s, const std::string& f) {
    if (s->kind != Kind::ExprStmt) return false;
    const NodePtr& call = s->kid(0);
    if (call->kind != Kind::Call || call->kids.size() != 1) return false;
    const NodePtr& func = call->kid(0);
    return func->kind == Kind::Attribute && func->text == "close" && is_name(func->kid(0), f);
  }
};

}  // namespace

std::unique_ptr<RuleImpl> make_r6() { return std::make_unique<Comprehension>(); }
std::unique_ptr<RuleImpl> make_r10() { return std::make_unique<WithOpen>(); }

}  // namespace shortcoder::rules::detail
