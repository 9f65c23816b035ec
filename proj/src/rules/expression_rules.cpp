#include <deque>

#include "rule_impl.hpp"

namespace shortcoder::rules::detail {

using namespace syntax;

namespace {

// Parts of `k in d` (or `k not in d`).
struct Membership {
  NodePtr key;
  NodePtr dict;
  bool negated;
};

std::optional<Membership> membership(const NodePtr& test) {
  const NodePtr& t = strip_groups(test);
  if (t->kind != Kind::Compare || t->kids.size() != 2) return std::nullopt;
  const NodePtr& op = t->kid(1);
  if (op->text != "in" && op->text != "not in") return std::nullopt;
  return Membership{t->kid(0), op->kid(0), op->text == "not in"};
}

bool is_lookup(const NodePtr& e, const Membership& m) {
  const NodePtr& s = strip_groups(e);
  return s->kind == Kind::Subscript && s->kid(1)->kind != Kind::Slice && same(s->kid(0), m.dict) &&
         same(s->kid(1), m.key);
}

// R8: if k in d: v = d[k] / else: v = D  ->  v = d.get(k, D)
// Also the expression form `d[k] if k in d else D`.
class DictGet final : public RuleImpl {
 public:
  std::optional<Match> match_statements(const Scope&, const std::vector<NodePtr>& stmts,
                                        std::size_t i, Strictness strictness) const override {
    const NodePtr& s = stmts[i];
    if (s->kind != Kind::If || s->kid(2)->kind != Kind::Else) return std::nullopt;
    const auto& body = s->kid(1)->kids;
    const auto& orelse = s->kid(2)->kid(0)->kids;
    if (body.size() != 1 || orelse.size() != 1) return std::nullopt;
    const auto a = simple_assign(body.front());
    const auto b = simple_assign(orelse.front());
    if (!a || !b || !same(a->first, b->first)) return std::nullopt;
    if (!is_name(a->first) && !effect_free(a->first)) return std::nullopt;
    auto parts = shape(s->kid(0), a->second, b->second, strictness);
    if (!parts) return std::nullopt;
    Match m;
    m.parts = {s, a->first, parts->key, parts->dict, parts->fallback};
    m.variant = 0;
    return m;
  }

  std::vector<NodePtr> rewrite_statements(const Match& m, Strictness) const override {
    NodePtr value = get_call(m.parts[3], m.parts[2], m.parts[4]);
    return {keep_leading_comments(stmt(Kind::Assign, {m.parts[1], value}), m.parts[0])};
  }

  std::optional<Match> match_expression(const NodePtr& e, const Node*,
                                        Strictness strictness) const override {
    if (e->kind != Kind::IfExp) return std::nullopt;
    auto parts = shape(e->kid(1), e->kid(0), e->kid(2), strictness);
    if (!parts) return std::nullopt;
    Match m;
    m.parts = {parts->key, parts->dict, parts->fallback};
    return m;
  }

  NodePtr rewrite_expression(const Match& m, Strictness) const override {
    return get_call(m.parts[1], m.parts[0], m.parts[2]);
  }

 private:
  struct Parts {
    NodePtr key;
    NodePtr dict;
    NodePtr fallback;
  };

  // `when_true` / `when_false` are the values picked when the test holds / fails.
  static std::optional<Parts> shape(const NodePtr& test, const NodePtr& when_true,
                                    const NodePtr& when_false, Strictness strictness) {
    const auto mem = membership(test);
    if (!mem) return std::nullopt;
    const NodePtr& lookup = mem->negated ? when_false : when_true;
    const NodePtr& fallback = mem->negated ? when_true : when_false;
    if (!is_lookup(lookup, *mem)) return std::nullopt;
    if (strictness == Strictness::Strict &&
        !(effect_free(mem->dict) && effect_free(mem->key) && effect_free(fallback))) {
      return std::nullopt;
    }
    return Parts{strip_groups(mem->key), mem->dict, strip_groups(fallback)};
  }

  static NodePtr get_call(const NodePtr& dict, const NodePtr& key, const NodePtr& fallback) {
    NodePtr method = expr(Kind::Attribute, {dict}, "get");
    return expr(Kind::Call, {method, key, fallback});
  }
};

// Split of a plain string literal into prefix, quote and body.
struct Literal {
  bool raw = false;
  char quote = '"';
  std::string body;
};

std::optional<Literal> plain_literal(const Node& s) {
  if (s.kind != Kind::String) return std::nullopt;
  const std::string& t = s.text;
  const auto q = t.find_first_of("'\"");
  const std::string prefix = t.substr(0, q);
  Literal lit;
  for (char c : prefix) {
    if (c == 'b' || c == 'B' || c == 'f' || c == 'F') return std::nullopt;
    if (c == 'r' || c == 'R') lit.raw = true;
  }
  lit.quote = t[q];
  const std::size_t qlen = t.compare(q, 3, std::string(3, lit.quote)) == 0 && t.size() >= q + 6 ? 3 : 1;
  lit.body = t.substr(q + qlen, t.size() - q - 2 * qlen);
  if (lit.body.find('\n') != std::string::npos) return std::nullopt;
  if (!lit.raw && lit.body.find("\\N") != std::string::npos) return std::nullopt;
  return lit;
}

bool is_fstring(const Node& s) {
  if (s.kind != Kind::String) return false;
  const auto q = s.text.find_first_of("'\"");
  return s.text.substr(0, q).find_first_of("fF") != std::string::npos;
}

bool is_bytes(const Node& s) {
  if (s.kind != Kind::String) return false;
  const auto q = s.text.find_first_of("'\"");
  return s.text.substr(0, q).find_first_of("bB") != std::string::npos;
}

const NodePtr* str_call_arg(const NodePtr& e) {
  if (e->kind != Kind::Call || e->kids.size() != 2 || !is_name(e->kid(0), "str")) return nullptr;
  const Kind k = e->kid(1)->kind;
  if (k == Kind::Starred || k == Kind::Keyword || k == Kind::DoubleStarred) return nullptr;
  return &e->kid(1);
}

// Re-quotes a literal body for a `quote`-delimited literal and escapes braces.
std::optional<std::string> requote(const Literal& lit, char quote) {
  std::string out;
  for (std::size_t i = 0; i < lit.body.size(); ++i) {
    const char c = lit.body[i];
    if (c == '\\' && i + 1 < lit.body.size()) {
      out += c;
      out += lit.body[++i];
      if (lit.body[i] == '{' || lit.body[i] == '}') out += lit.body[i];
      continue;
    }
    if (c == quote) {
      if (lit.raw) return std::nullopt;
      out += '\\';
      out += c;
    } else if (c == '{' || c == '}') {
      out += c;
      out += c;
    } else {
      out += c;
    }
  }
  return out;
}

// R9: "a" + x + "b"  ->  "a{}b".format(x)
class StrFormat final : public RuleImpl {
 public:
  std::optional<Match> match_expression(const NodePtr& e, const Node* parent,
                                        Strictness strictness) const override {
    if (!is_plus(*e)) return std::nullopt;
    if (parent && is_plus(*parent) && parent->kid(0) == e) return std::nullopt;
    std::deque<NodePtr> operands;
    NodePtr cur = e;
    while (is_plus(*cur)) {
      operands.push_front(cur->kid(1));
      cur = cur->kid(0);
    }
    operands.push_front(cur);

    std::optional<Literal> first;
    std::string body;
    Match m;
    bool has_value = false;
    for (const auto& op : operands) {
      if (is_bytes(*op)) return std::nullopt;
      if (auto lit = plain_literal(*op)) {
        if (!first) first = lit;
        if (lit->raw != first->raw) return std::nullopt;
        auto piece = requote(*lit, first->quote);
        if (!piece) return std::nullopt;
        body += *piece;
        continue;
      }
      if (op->kind == Kind::StringConcat) return std::nullopt;
      if (strictness == Strictness::Strict && !str_call_arg(op) && !is_fstring(*op)) {
        return std::nullopt;
      }
      const NodePtr* inner = str_call_arg(op);
      m.parts.push_back(strip_groups(inner ? *inner : op));
      body += "{}";
      has_value = true;
    }
    if (!first || !has_value) return std::nullopt;
    const std::string text = std::string(first->raw ? "r" : "") + first->quote + body + first->quote;
    m.parts.insert(m.parts.begin(), make_node(Kind::String, {}, text));
    return m;
  }

  NodePtr rewrite_expression(const Match& m, Strictness) const override {
    std::vector<NodePtr> kids{expr(Kind::Attribute, {m.parts[0]}, "format")};
    kids.insert(kids.end(), m.parts.begin() + 1, m.parts.end());
    return expr(Kind::Call, std::move(kids));
  }

 private:
  static bool is_plus(const Node& n) { return n.kind == Kind::BinOp && n.text == "+"; }
};

}  // namespace

std::unique_ptr<RuleImpl> make_r8() { return std::make_unique<DictGet>(); }
std::unique_ptr<RuleImpl> make_r9() { return std::make_unique<StrFormat>(); }

}  // namespace shortcoder::rules::detail
