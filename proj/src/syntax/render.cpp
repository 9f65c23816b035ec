#include <cstdint>

#include "shortcoder/syntax/syntax.hpp"

namespace shortcoder::syntax {

namespace {

enum Flag : unsigned {
  kTupleOk = 1u << 0,
  kYieldOk = 1u << 1,
  kNamedOk = 1u << 2,
};
constexpr unsigned kAll = kTupleOk | kYieldOk | kNamedOk;

// Binding strength, loosest first. Atoms and trailers are kPrimary.
enum Prec : int {
  kTuple = 1,
  kNamed = 2,
  kLambda = 3,
  kIfExp = 4,
  kOr = 5,
  kAnd = 6,
  kNot = 7,
  kCompare = 8,
  kBitOr = 9,
  kXor = 10,
  kBitAnd = 11,
  kShift = 12,
  kArith = 13,
  kTerm = 14,
  kUnary = 15,
  kPower = 16,
  kAwait = 17,
  kPrimary = 18,
};

int binop_prec(const std::string& op) {
  if (op == "|") return kBitOr;
  if (op == "^") return kXor;
  if (op == "&") return kBitAnd;
  if (op == "<<" || op == ">>") return kShift;
  if (op == "+" || op == "-") return kArith;
  if (op == "**") return kPower;
  return kTerm;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case Kind::Tuple:
      return n.kids.empty() ? kPrimary : kTuple;
    case Kind::Yield:
    case Kind::YieldFrom:
      return 0;
    case Kind::NamedExpr:
      return kNamed;
    case Kind::Lambda:
      return kLambda;
    case Kind::IfExp:
      return kIfExp;
    case Kind::BoolOp:
      return n.text == "or" ? kOr : kAnd;
    case Kind::UnaryOp:
      return n.text == "not" ? kNot : kUnary;
    case Kind::Compare:
      return kCompare;
    case Kind::BinOp:
      return binop_prec(n.text);
    case Kind::Await:
      return kAwait;
    default:
      return kPrimary;
  }
}

class Renderer {
 public:
  std::string out;

  // ---- expressions --------------------------------------------------------

  std::string ex(const NodePtr& node, int min, unsigned flags = 0) {
    const Node& n = *node;
    int prec = precedence(n);
    // Wherever the grammar accepts a bare walrus it sits at lambda level.
    if (n.kind == Kind::NamedExpr && (flags & kNamedOk)) prec = kLambda;
    bool paren = prec < min;
    if (n.kind == Kind::Tuple && !n.kids.empty() && !(flags & kTupleOk)) paren = true;
    if ((n.kind == Kind::Yield || n.kind == Kind::YieldFrom) && !(flags & kYieldOk)) paren = true;
    if (n.kind == Kind::NamedExpr && !(flags & kNamedOk)) paren = true;
    if (paren) return "(" + bare(n, kAll) + ")";
    return bare(n, flags);
  }

  std::string join(const std::vector<NodePtr>& xs, std::size_t from, int min, unsigned flags) {
    std::string s;
    for (std::size_t i = from; i < xs.size(); ++i) {
      if (i > from) s += ", ";
      s += ex(xs[i], min, flags);
    }
    return s;
  }

  std::string element(const NodePtr& e, unsigned flags) {
    if (e->kind == Kind::Starred) return "*" + ex(e->kid(0), kBitOr);
    return ex(e, kLambda, flags & kNamedOk);
  }

  std::string elements(const std::vector<NodePtr>& xs, std::size_t from, unsigned flags) {
    std::string s;
    for (std::size_t i = from; i < xs.size(); ++i) {
      if (i > from) s += ", ";
      s += element(xs[i], flags);
    }
    return s;
  }

  std::string tuple(const Node& n, unsigned inner_flags) {
    if (n.kids.empty()) return "()";
    std::string s = elements(n.kids, 0, inner_flags);
    if (n.kids.size() == 1) s += ",";
    return s;
  }

  std::string comprehensions(const Node& n) {
    std::string s;
    for (std::size_t i = 1; i < n.kids.size(); ++i) {
      const Node& c = *n.kids[i];
      s += c.is_async ? " async for " : " for ";
      s += target_list(c.kid(0));
      s += " in " + ex(c.kid(1), kOr);
      for (std::size_t j = 2; j < c.kids.size(); ++j) s += " if " + ex(c.kids[j], kOr);
    }
    return s;
  }

  std::string target_list(const NodePtr& t) {
    if (t->kind == Kind::Tuple && !t->kids.empty()) return tuple(*t, 0);
    return ex(t, kBitOr);
  }

  std::string param(const Node& p) {
    switch (p.kind) {
      case Kind::PosOnlyMarker:
        return "/";
      case Kind::KwOnlyMarker:
        return "*";
      default:
        break;
    }
    std::string s = p.aux + p.text;
    const bool annotated = !p.kid(0)->empty();
    if (annotated) s += ": " + ex(p.kid(0), kLambda);
    if (!p.kid(1)->empty()) s += (annotated ? " = " : "=") + ex(p.kid(1), kLambda);
    return s;
  }

  std::string parameters(const Node& ps) {
    std::string s;
    for (std::size_t i = 0; i < ps.kids.size(); ++i) {
      if (i) s += ", ";
      s += param(*ps.kids[i]);
    }
    return s;
  }

  std::string argument(const NodePtr& a, bool sole) {
    switch (a->kind) {
      case Kind::Keyword:
        return a->text + "=" + ex(a->kid(0), kLambda);
      case Kind::Starred:
        return "*" + ex(a->kid(0), kLambda);
      case Kind::DoubleStarred:
        return "**" + ex(a->kid(0), kLambda);
      case Kind::GeneratorExp:
        if (sole) return ex(a->kid(0), kLambda, kNamedOk) + comprehensions(*a);
        return ex(a, kLambda);
      default:
        return ex(a, kLambda, kNamedOk);
    }
  }

  std::string arguments(const std::vector<NodePtr>& args, std::size_t from) {
    std::string s;
    const bool sole = args.size() == from + 1;
    for (std::size_t i = from; i < args.size(); ++i) {
      if (i > from) s += ", ";
      s += argument(args[i], sole);
    }
    return s;
  }

  std::string slice_part(const NodePtr& p) { return p->empty() ? "" : ex(p, kLambda); }

  std::string subscript_index(const NodePtr& idx) {
    auto one = [&](const NodePtr& e) -> std::string {
      if (e->kind == Kind::Slice) {
        std::string s = slice_part(e->kid(0)) + ":" + slice_part(e->kid(1));
        if (!e->kid(2)->empty()) s += ":" + slice_part(e->kid(2));
        return s;
      }
      if (e->kind == Kind::Starred) return "*" + ex(e->kid(0), kBitOr);
      return ex(e, kLambda, kNamedOk);
    };
    if (idx->kind == Kind::Tuple && !idx->kids.empty()) {
      std::string s;
      for (std::size_t i = 0; i < idx->kids.size(); ++i) {
        if (i) s += ", ";
        s += one(idx->kids[i]);
      }
      if (idx->kids.size() == 1) s += ",";
      return s;
    }
    return one(idx);
  }

  std::string dict_entry(const NodePtr& e) {
    if (e->kind == Kind::DoubleStarred) return "**" + ex(e->kid(0), kBitOr);
    return ex(e->kid(0), kLambda) + ": " + ex(e->kid(1), kLambda);
  }

  std::string bare(const Node& n, unsigned flags) {
    switch (n.kind) {
      case Kind::Name:
      case Kind::Number:
      case Kind::String:
      case Kind::Constant:
        return n.text;
      case Kind::StringConcat: {
        std::string s;
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          if (i) s += " ";
          s += n.kids[i]->text;
        }
        return s;
      }
      case Kind::Group:
        return "(" + ex(n.kid(0), 0, kAll) + ")";
      case Kind::Tuple:
        return tuple(n, flags & kNamedOk);
      case Kind::List:
        return "[" + elements(n.kids, 0, kNamedOk) + "]";
      case Kind::Set:
        return "{" + elements(n.kids, 0, kNamedOk) + "}";
      case Kind::Dict: {
        std::string s = "{";
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          if (i) s += ", ";
          s += dict_entry(n.kids[i]);
        }
        return s + "}";
      }
      case Kind::ListComp:
        return "[" + ex(n.kid(0), kLambda, kNamedOk) + comprehensions(n) + "]";
      case Kind::SetComp:
        return "{" + ex(n.kid(0), kLambda, kNamedOk) + comprehensions(n) + "}";
      case Kind::GeneratorExp:
        return "(" + ex(n.kid(0), kLambda, kNamedOk) + comprehensions(n) + ")";
      case Kind::DictComp:
        return "{" + dict_entry(n.kid(0)) + comprehensions(n) + "}";
      case Kind::BinOp: {
        const int p = binop_prec(n.text);
        if (n.text == "**") {
          return ex(n.kid(0), kAwait) + " ** " + ex(n.kid(1), kUnary);
        }
        return ex(n.kid(0), p) + " " + n.text + " " + ex(n.kid(1), p + 1);
      }
      case Kind::UnaryOp:
        if (n.text == "not") return "not " + ex(n.kid(0), kNot);
        return n.text + ex(n.kid(0), kUnary);
      case Kind::BoolOp: {
        const int p = n.text == "or" ? kAnd : kNot;
        std::string s;
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          if (i) s += " " + n.text + " ";
          s += ex(n.kids[i], p);
        }
        return s;
      }
      case Kind::Compare: {
        std::string s = ex(n.kid(0), kBitOr);
        for (std::size_t i = 1; i < n.kids.size(); ++i) {
          s += " " + n.kids[i]->text + " " + ex(n.kids[i]->kid(0), kBitOr);
        }
        return s;
      }
      case Kind::IfExp:
        return ex(n.kid(0), kOr) + " if " + ex(n.kid(1), kOr) + " else " +
               ex(n.kid(2), kLambda);
      case Kind::Lambda: {
        std::string ps = parameters(*n.kid(0));
        return "lambda" + (ps.empty() ? "" : " " + ps) + ": " + ex(n.kid(1), kLambda);
      }
      case Kind::NamedExpr:
        return n.kid(0)->text + " := " + ex(n.kid(1), kLambda);
      case Kind::Yield:
        if (n.kid(0)->empty()) return "yield";
        return "yield " + ex(n.kid(0), 0, kTupleOk);
      case Kind::YieldFrom:
        return "yield from " + ex(n.kid(0), kLambda);
      case Kind::Await:
        return "await " + ex(n.kid(0), kPrimary);
      case Kind::Call:
        return ex(n.kid(0), kPrimary) + "(" + arguments(n.kids, 1) + ")";
      case Kind::Attribute: {
        std::string base = ex(n.kid(0), kPrimary);
        if (n.kid(0)->kind == Kind::Number) base += " ";
        return base + "." + n.text;
      }
      case Kind::Subscript:
        return ex(n.kid(0), kPrimary) + "[" + subscript_index(n.kid(1)) + "]";
      case Kind::Starred:
        return "*" + ex(n.kid(0), kBitOr);
      case Kind::DoubleStarred:
        return "**" + ex(n.kid(0), kBitOr);
      case Kind::Keyword:
        return n.text + "=" + ex(n.kid(0), kLambda);
      case Kind::Slice:
        return subscript_index(std::make_shared<Node>(n));
      default:
        (void)flags;
        return "<" + std::string(kind_name(n.kind)) + ">";
    }
  }

  // ---- statements ---------------------------------------------------------

  void line(int indent, const std::string& text, const std::string& eol = {}) {
    out.append(static_cast<std::size_t>(indent) * 4, ' ');
    out += text;
    if (!eol.empty()) out += "  " + eol;
    out += '\n';
  }

  void comments(int indent, const std::vector<std::string>& cs) {
    for (const auto& c : cs) line(indent, c);
  }

  void block(const Node& b, int indent) {
    comments(indent, b.trivia.before);
    for (const auto& s : b.kids) stmt(*s, indent);
    comments(indent, b.trivia.after);
  }

  void clause(const std::string& header, const Node& owner, const Node& body, int indent) {
    comments(indent, owner.trivia.before);
    line(indent, header + ":", owner.trivia.eol);
    block(body, indent + 1);
  }

  void orelse(const NodePtr& e, int indent) {
    if (e->empty()) return;
    if (e->kind == Kind::If) {
      if_chain(*e, indent, "elif ");
      return;
    }
    clause("else", *e, *e->kid(0), indent);
  }

  void if_chain(const Node& s, int indent, const char* keyword) {
    clause(keyword + ex(s.kid(0), kLambda, kNamedOk), s, *s.kid(1), indent);
    orelse(s.kid(2), indent);
  }

  std::string simple(const Node& s) {
    switch (s.kind) {
      case Kind::ExprStmt:
        return ex(s.kid(0), 0, kTupleOk | kYieldOk);
      case Kind::Assign: {
        std::string r;
        for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) r += ex(s.kids[i], 0, kTupleOk) + " = ";
        return r + ex(s.kids.back(), 0, kTupleOk | kYieldOk);
      }
      case Kind::AugAssign:
        return ex(s.kid(0), kPrimary) + " " + s.text + " " + ex(s.kid(1), 0, kTupleOk | kYieldOk);
      case Kind::AnnAssign: {
        std::string r = ex(s.kid(0), kPrimary) + ": " + ex(s.kid(1), kLambda);
        if (!s.kid(2)->empty()) r += " = " + ex(s.kid(2), 0, kTupleOk | kYieldOk);
        return r;
      }
      case Kind::Return:
        return s.kid(0)->empty() ? "return" : "return " + ex(s.kid(0), 0, kTupleOk);
      case Kind::Delete:
        return "del " + join(s.kids, 0, kBitOr, 0);
      case Kind::Pass:
        return "pass";
      case Kind::Break:
        return "break";
      case Kind::Continue:
        return "continue";
      case Kind::Raise: {
        if (s.kid(0)->empty()) return "raise";
        std::string r = "raise " + ex(s.kid(0), kLambda);
        if (!s.kid(1)->empty()) r += " from " + ex(s.kid(1), kLambda);
        return r;
      }
      case Kind::Global:
      case Kind::Nonlocal: {
        std::string r = s.kind == Kind::Global ? "global " : "nonlocal ";
        for (std::size_t i = 0; i < s.kids.size(); ++i) r += (i ? ", " : "") + s.kids[i]->text;
        return r;
      }
      case Kind::Import:
      case Kind::ImportFrom: {
        std::string r = s.kind == Kind::Import ? "import " : "from " + s.text + " import ";
        for (std::size_t i = 0; i < s.kids.size(); ++i) {
          if (i) r += ", ";
          r += s.kids[i]->text;
          if (!s.kids[i]->aux.empty()) r += " as " + s.kids[i]->aux;
        }
        return r;
      }
      case Kind::Assert: {
        std::string r = "assert " + ex(s.kid(0), kLambda);
        if (!s.kid(1)->empty()) r += ", " + ex(s.kid(1), kLambda);
        return r;
      }
      default:
        return "<" + std::string(kind_name(s.kind)) + ">";
    }
  }

  void stmt(const Node& s, int indent) {
    const std::string async = s.is_async ? "async " : "";
    switch (s.kind) {
      case Kind::If:
        if_chain(s, indent, "if ");
        return;
      case Kind::While:
        clause("while " + ex(s.kid(0), kLambda, kNamedOk), s, *s.kid(1), indent);
        orelse(s.kid(2), indent);
        return;
      case Kind::For:
        clause(async + "for " + target_list(s.kid(0)) + " in " + ex(s.kid(1), 0, kTupleOk), s,
               *s.kid(2), indent);
        orelse(s.kid(3), indent);
        return;
      case Kind::With: {
        std::string h = async + "with ";
        for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) {
          if (i) h += ", ";
          const Node& item = *s.kids[i];
          h += ex(item.kid(0), kLambda);
          if (!item.kid(1)->empty()) h += " as " + ex(item.kid(1), kBitOr);
        }
        clause(h, s, *s.kids.back(), indent);
        return;
      }
      case Kind::Try: {
        clause("try", s, *s.kid(0), indent);
        const std::size_t n = s.kids.size();
        for (std::size_t i = 1; i + 2 < n; ++i) {
          const Node& h = *s.kids[i];
          std::string head = "except";
          if (!h.kid(0)->empty()) head += " " + ex(h.kid(0), kLambda);
          if (!h.aux.empty()) head += " as " + h.aux;
          clause(head, h, *h.kid(1), indent);
        }
        orelse(s.kids[n - 2], indent);
        if (!s.kids[n - 1]->empty()) clause("finally", *s.kids[n - 1], *s.kids[n - 1]->kid(0), indent);
        return;
      }
      case Kind::FunctionDef:
      case Kind::ClassDef: {
        comments(indent, s.trivia.before);
        for (const auto& d : s.kid(0)->kids) line(indent, "@" + ex(d, kLambda, kNamedOk));
        std::string h;
        const Node* body;
        if (s.kind == Kind::FunctionDef) {
          h = async + "def " + s.text + "(" + parameters(*s.kid(1)) + ")";
          if (!s.kid(2)->empty()) h += " -> " + ex(s.kid(2), kLambda);
          body = s.kid(3).get();
        } else {
          h = "class " + s.text;
          if (!s.kid(1)->kids.empty()) h += "(" + arguments(s.kid(1)->kids, 0) + ")";
          body = s.kid(2).get();
        }
        line(indent, h + ":", s.trivia.eol);
        block(*body, indent + 1);
        return;
      }
      default:
        comments(indent, s.trivia.before);
        line(indent, simple(s), s.trivia.eol);
        return;
    }
  }
};

NodePtr normalize_node(const NodePtr& n) {
  if (n->kind == Kind::Group) return normalize_node(n->kid(0));
  auto copy = std::make_shared<Node>();
  copy->kind = n->kind;
  copy->text = n->text;
  copy->aux = n->aux;
  copy->is_async = n->is_async;
  copy->kids.reserve(n->kids.size());
  for (const auto& k : n->kids) copy->kids.push_back(normalize_node(k));
  return copy;
}

}  // namespace

std::string render(const NodePtr& node) {
  Renderer r;
  if (node->kind == Kind::Module || node->kind == Kind::Block) {
    r.block(*node, 0);
  } else if (is_statement(node->kind)) {
    r.stmt(*node, 0);
  } else {
    r.out = r.ex(node, 0, kTupleOk | kYieldOk);
  }
  return r.out;
}

std::string render(const SyntaxTree& tree) { return render(tree.root()); }

std::string render_expression(const NodePtr& expr) {
  Renderer r;
  return r.ex(expr, 0, kTupleOk | kYieldOk);
}

NodePtr normalize(const NodePtr& node) { return normalize_node(node); }

SyntaxTree normalize(const SyntaxTree& tree) {
  return SyntaxTree(normalize_node(tree.root()), tree.source());
}

bool equivalent_modulo_layout(const SyntaxTree& a, const SyntaxTree& b) {
  return structurally_equal(normalize(a.root()), normalize(b.root()));
}

}  // namespace shortcoder::syntax
