#include <functional>

#include "rule_impl.hpp"

namespace shortcoder::rules::detail {

using namespace syntax;

Kind Scope::scope_kind() const {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    const Kind k = it->owner->kind;
    if (k == Kind::Module || k == Kind::FunctionDef || k == Kind::ClassDef) return k;
  }
  return Kind::Module;
}

bool Scope::mentioned_later(std::size_t consumed, const std::string& id) const {
  const Frame& inner = frames_.back();
  std::set<const Node*> region;
  for (std::size_t j = inner.index; j < inner.index + consumed; ++j) {
    region.insert((*inner.stmts)[j].get());
  }
  std::vector<const Node*> later;
  bool innermost = true;
  const Node* module = nullptr;
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    const std::size_t from = it->index + (innermost ? consumed : 1);
    innermost = false;
    for (std::size_t j = from; j < it->stmts->size(); ++j) later.push_back((*it->stmts)[j].get());
    if (it->loop_body) later.push_back(it->owner);
    const Kind k = it->owner->kind;
    if (k == Kind::FunctionDef || k == Kind::ClassDef) break;
    if (k == Kind::Module) module = it->owner;
  }
  if (module) later.push_back(module);

  // At module level only function and class bodies matter beyond `later`,
  // since they can read globals whenever they run.
  std::function<bool(const Node*, bool)> scan = [&](const Node* n, bool defs_only) {
    if (region.count(n)) return false;
    const bool def =
        n->kind == Kind::FunctionDef || n->kind == Kind::ClassDef || n->kind == Kind::Lambda;
    if (!defs_only || def) {
      if (mentions_excluding(*n, id, region)) return true;
      return false;
    }
    for (const auto& k : n->kids) {
      if (scan(k.get(), true)) return true;
    }
    return false;
  };
  for (const Node* n : later) {
    if (scan(n, n == module)) return true;
  }
  return false;
}

bool is_name(const NodePtr& n, std::string_view id) {
  return n->kind == Kind::Name && (id.empty() || n->text == id);
}

bool same(const NodePtr& a, const NodePtr& b) {
  return structurally_equal(normalize(a), normalize(b));
}

namespace {

void collect_names(const Node& n, std::set<std::string>& out) {
  if (n.kind == Kind::Name) out.insert(n.text);
  if (n.kind == Kind::Param) out.insert(n.text);
  for (const auto& k : n.kids) collect_names(*k, out);
}

}  // namespace

bool mentions_excluding(const Node& n, const std::string& id, const std::set<const Node*>& skip) {
  if (skip.count(&n)) return false;
  if ((n.kind == Kind::Name || n.kind == Kind::Param) && n.text == id) return true;
  if (n.kind == Kind::Global || n.kind == Kind::Nonlocal) {
    for (const auto& k : n.kids) {
      if (k->text == id) return true;
    }
  }
  for (const auto& k : n.kids) {
    if (mentions_excluding(*k, id, skip)) return true;
  }
  return false;
}

namespace {

bool is_fstring(const Node& s) {
  const auto quote = s.text.find_first_of("'\"");
  return s.text.substr(0, quote).find_first_of("fF") != std::string::npos;
}

bool contains_kind_impl(const Node& n, std::initializer_list<Kind> kinds, bool cross_scopes) {
  for (Kind k : kinds) {
    if (n.kind == k) return true;
  }
  if (!cross_scopes &&
      (n.kind == Kind::FunctionDef || n.kind == Kind::ClassDef || n.kind == Kind::Lambda)) {
    return false;
  }
  for (const auto& k : n.kids) {
    if (contains_kind_impl(*k, kinds, cross_scopes)) return true;
  }
  return false;
}

bool target_binds(const Node& t, const std::string& id) {
  switch (t.kind) {
    case Kind::Name:
      return t.text == id;
    case Kind::Group:
    case Kind::Starred:
      return target_binds(*t.kid(0), id);
    case Kind::Tuple:
    case Kind::List:
      for (const auto& e : t.kids) {
        if (target_binds(*e, id)) return true;
      }
      return false;
    default:
      return false;
  }
}

std::string alias_binding(const Node& alias) {
  if (!alias.aux.empty()) return alias.aux;
  const auto dot = alias.text.find('.');
  return alias.text.substr(0, dot);
}

}  // namespace

std::set<std::string> names_in(const NodePtr& n) {
  std::set<std::string> out;
  collect_names(*n, out);
  return out;
}

bool mentions(const NodePtr& n, const std::string& id) { return mentions_excluding(*n, id, {}); }

bool mentions(const std::vector<const Node*>& nodes, const std::string& id) {
  for (const Node* n : nodes) {
    if (mentions_excluding(*n, id, {})) return true;
  }
  return false;
}

bool contains_kind(const NodePtr& n, std::initializer_list<Kind> kinds) {
  return contains_kind_impl(*n, kinds, true);
}

bool contains_kind_in_scope(const NodePtr& n, std::initializer_list<Kind> kinds) {
  return contains_kind_impl(*n, kinds, false);
}

bool effect_free(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Name:
    case Kind::Number:
    case Kind::Constant:
      return true;
    case Kind::String:
    case Kind::StringConcat:
      return immutable_literal(n);
    case Kind::Attribute:
    case Kind::Group:
      return effect_free(n->kid(0));
    case Kind::UnaryOp:
      return n->text != "not" && n->kid(0)->kind == Kind::Number;
    default:
      return false;
  }
}

bool immutable_literal(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Number:
    case Kind::Constant:
      return true;
    case Kind::String:
      return !is_fstring(*n);
    case Kind::StringConcat:
      for (const auto& s : n->kids) {
        if (is_fstring(*s)) return false;
      }
      return true;
    case Kind::UnaryOp:
      return (n->text == "-" || n->text == "+") && n->kid(0)->kind == Kind::Number;
    case Kind::Group:
      return immutable_literal(n->kid(0));
    case Kind::Tuple:
      for (const auto& e : n->kids) {
        if (!immutable_literal(e)) return false;
      }
      return true;
    default:
      return false;
  }
}

bool binds(const NodePtr& n, const std::string& id) {
  const Node& s = *n;
  switch (s.kind) {
    case Kind::Assign:
      for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) {
        if (target_binds(*s.kids[i], id)) return true;
      }
      break;
    case Kind::AugAssign:
    case Kind::AnnAssign:
      if (target_binds(*s.kid(0), id)) return true;
      break;
    case Kind::For:
    case Kind::Comprehension:
      if (target_binds(*s.kid(0), id)) return true;
      break;
    case Kind::WithItem:
      if (!s.kid(1)->empty() && target_binds(*s.kid(1), id)) return true;
      break;
    case Kind::Delete:
      for (const auto& t : s.kids) {
        if (target_binds(*t, id)) return true;
      }
      break;
    case Kind::NamedExpr:
      if (s.kid(0)->text == id) return true;
      break;
    case Kind::ExceptHandler:
      if (s.aux == id) return true;
      break;
    case Kind::FunctionDef:
    case Kind::ClassDef:
      if (s.text == id) return true;
      break;
    case Kind::Import:
    case Kind::ImportFrom:
      for (const auto& a : s.kids) {
        if (a->text == "*" || alias_binding(*a) == id) return true;
      }
      break;
    case Kind::Global:
    case Kind::Nonlocal:
      for (const auto& k : s.kids) {
        if (k->text == id) return true;
      }
      break;
    default:
      break;
  }
  for (const auto& k : s.kids) {
    if (binds(k, id)) return true;
  }
  return false;
}

std::optional<std::pair<NodePtr, NodePtr>> simple_assign(const NodePtr& s) {
  if (s->kind != Kind::Assign || s->kids.size() != 2) return std::nullopt;
  return std::make_pair(s->kid(0), s->kid(1));
}

NodePtr keep_leading_comments(const NodePtr& replacement, const NodePtr& original) {
  if (original->trivia.before.empty()) return replacement;
  Trivia t;
  t.before = original->trivia.before;
  return with_trivia(*replacement, std::move(t));
}

NodePtr stmt(Kind kind, std::vector<NodePtr> kids, std::string text) {
  return make_node(kind, std::move(kids), std::move(text));
}

NodePtr expr(Kind kind, std::vector<NodePtr> kids, std::string text) {
  return make_node(kind, std::move(kids), std::move(text));
}

NodePtr block(std::vector<NodePtr> stmts) { return make_node(Kind::Block, std::move(stmts)); }

}  // namespace shortcoder::rules::detail
