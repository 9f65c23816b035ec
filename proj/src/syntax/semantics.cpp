#include <functional>
#include <map>
#include <optional>
#include <set>

#include "shortcoder/syntax/syntax.hpp"

namespace shortcoder::syntax {

namespace {

std::string describe(const Node& n) {
  switch (n.kind) {
    case Kind::Number:
    case Kind::String:
    case Kind::StringConcat:
      return "literal";
    case Kind::Constant:
      return n.text == "..." ? "ellipsis" : n.text;
    case Kind::Call:
      return "function call";
    case Kind::BinOp:
    case Kind::UnaryOp:
      return "expression";
    case Kind::BoolOp:
      return "expression";
    case Kind::Compare:
      return "comparison";
    case Kind::IfExp:
      return "conditional expression";
    case Kind::Lambda:
      return "lambda";
    case Kind::Dict:
      return "dict literal";
    case Kind::Set:
      return "set display";
    case Kind::ListComp:
      return "list comprehension";
    case Kind::SetComp:
      return "set comprehension";
    case Kind::DictComp:
      return "dict comprehension";
    case Kind::GeneratorExp:
      return "generator expression";
    case Kind::Yield:
    case Kind::YieldFrom:
      return "yield expression";
    case Kind::Await:
      return "await expression";
    case Kind::NamedExpr:
      return "named expression";
    default:
      return "expression";
  }
}

class Checker {
 public:
  explicit Checker(const LineIndex& lines) : lines_(lines) {}

  void module(const Node& m) {
    Ctx ctx;
    ctx.module_level = true;
    for (const auto& s : m.kids) stmt(*s, ctx);
    declarations(m.kids, nullptr);
  }

 private:
  struct Ctx {
    bool in_function = false;
    bool in_async = false;
    bool in_loop = false;
    bool module_level = false;
    const char* comprehension = nullptr;
  };

  [[noreturn]] void fail(const Node& at, const std::string& msg) const {
    const auto [line, col] = lines_.locate(at.span.begin);
    throw ParseError(msg, line, col);
  }

  // A global/nonlocal name must not be a parameter or appear earlier in the scope.
  void declarations(const std::vector<NodePtr>& body, const Node* params) {
    std::set<std::string> param_names;
    if (params) {
      for (const auto& p : params->kids) {
        if (p->kind == Kind::Param) param_names.insert(p->text);
      }
    }
    std::map<std::string, bool> seen;  // name -> bound (else only read)
    std::function<void(const NodePtr&, bool)> visit = [&](const NodePtr& n, bool store) {
      if (!n || n->empty()) return;
      switch (n->kind) {
        case Kind::Name: {
          auto& bound = seen[n->text];
          bound = bound || store;
          return;
        }
        case Kind::Global:
        case Kind::Nonlocal: {
          const std::string what = n->kind == Kind::Global ? "global" : "nonlocal";
          for (const auto& k : n->kids) {
            if (param_names.count(k->text)) {
              fail(*n, "name '" + k->text + "' is parameter and " + what);
            }
            auto it = seen.find(k->text);
            if (it != seen.end()) {
              fail(*n, "name '" + k->text + "' is " +
                           (it->second ? "assigned to before " : "used prior to ") + what +
                           " declaration");
            }
          }
          return;
        }
        case Kind::FunctionDef:
        case Kind::ClassDef:
          for (const auto& d : n->kid(0)->kids) visit(d, false);
          seen[n->text] = true;
          return;
        case Kind::Import:
        case Kind::ImportFrom:
          return;  // CPython does not flag import bindings here
        case Kind::Lambda:
        case Kind::ListComp:
        case Kind::SetComp:
        case Kind::DictComp:
        case Kind::GeneratorExp:
          return;
        case Kind::Assign:
          for (std::size_t i = 0; i + 1 < n->kids.size(); ++i) visit(n->kids[i], true);
          visit(n->kids.back(), false);
          return;
        case Kind::AugAssign:
        case Kind::AnnAssign:
        case Kind::For:
        case Kind::NamedExpr:
          for (std::size_t i = 0; i < n->kids.size(); ++i) visit(n->kids[i], i == 0);
          return;
        case Kind::WithItem:
          visit(n->kid(0), false);
          visit(n->kid(1), true);
          return;
        case Kind::Delete:
          for (const auto& k : n->kids) visit(k, true);
          return;
        default: {
          const bool keep = n->kind == Kind::Tuple || n->kind == Kind::List ||
                            n->kind == Kind::Starred || n->kind == Kind::Group;
          for (const auto& k : n->kids) visit(k, store && keep);
        }
      }
    };
    for (const auto& s : body) visit(s, false);
  }

  // ---- targets ------------------------------------------------------------

  void assign_target(const Node& t, bool top, Ctx ctx) {
    switch (t.kind) {
      case Kind::Name:
        if (t.text == "__debug__") fail(t, "cannot assign to __debug__");
        return;
      case Kind::Attribute:
      case Kind::Subscript:
        expr(t, ctx);
        return;
      case Kind::Group:
        assign_target(*t.kid(0), top, ctx);
        return;
      case Kind::Tuple:
      case Kind::List: {
        int stars = 0;
        for (const auto& e : t.kids) {
          if (e->kind == Kind::Starred) {
            ++stars;
            assign_target(*e->kid(0), false, ctx);
          } else {
            assign_target(*e, false, ctx);
          }
        }
        if (stars > 1) fail(t, "multiple starred expressions in assignment");
        return;
      }
      case Kind::Starred:
        fail(t, "starred assignment target must be in a list or tuple");
      default:
        (void)top;
        fail(t, "cannot assign to " + describe(t));
    }
  }

  void del_target(const Node& t, Ctx ctx) {
    switch (t.kind) {
      case Kind::Name:
        return;
      case Kind::Attribute:
      case Kind::Subscript:
        expr(t, ctx);
        return;
      case Kind::Group:
        del_target(*t.kid(0), ctx);
        return;
      case Kind::Tuple:
      case Kind::List:
        for (const auto& e : t.kids) del_target(*e, ctx);
        return;
      default:
        fail(t, "cannot delete " + describe(t));
    }
  }

  void aug_target(const Node& t, Ctx ctx) {
    const Node* n = &t;
    while (n->kind == Kind::Group) n = n->kid(0).get();
    if (n->kind == Kind::Name || n->kind == Kind::Attribute || n->kind == Kind::Subscript) {
      assign_target(*n, true, ctx);
      return;
    }
    const std::string what = n->kind == Kind::Tuple ? "tuple"
                             : n->kind == Kind::List ? "list"
                                                     : describe(*n);
    fail(t, "'" + what + "' is an illegal expression for augmented assignment");
  }

  // ---- statements ---------------------------------------------------------

  void block(const Node& b, Ctx ctx) {
    ctx.module_level = false;
    for (const auto& s : b.kids) stmt(*s, ctx);
  }

  void opt_expr(const NodePtr& e, Ctx ctx) {
    if (!e->empty()) expr(*e, ctx);
  }

  void parameters(const Node& params, Ctx outer) {
    std::set<std::string> seen;
    for (const auto& p : params.kids) {
      if (p->kind != Kind::Param) continue;
      if (!seen.insert(p->text).second) {
        fail(*p, "duplicate argument '" + p->text + "' in function definition");
      }
      opt_expr(p->kid(0), outer);
      opt_expr(p->kid(1), outer);
    }
  }

  void stmt(const Node& s, Ctx ctx) {
    switch (s.kind) {
      case Kind::ExprStmt:
        expr(*s.kid(0), ctx);
        return;
      case Kind::Assign:
        for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) {
          if (s.kids[i]->kind == Kind::Yield || s.kids[i]->kind == Kind::YieldFrom) {
            fail(*s.kids[i], "assignment to yield expression not possible");
          }
          assign_target(*s.kids[i], true, ctx);
        }
        expr(*s.kids.back(), ctx);
        return;
      case Kind::AugAssign:
        aug_target(*s.kid(0), ctx);
        expr(*s.kid(1), ctx);
        return;
      case Kind::AnnAssign: {
        const Node& t = *s.kid(0);
        if (t.kind == Kind::Tuple) fail(t, "only single target (not tuple) can be annotated");
        if (t.kind == Kind::List) fail(t, "only single target (not list) can be annotated");
        if (t.kind != Kind::Name && t.kind != Kind::Attribute && t.kind != Kind::Subscript &&
            t.kind != Kind::Group) {
          fail(t, "illegal target for annotation");
        }
        assign_target(t, true, ctx);
        expr(*s.kid(1), ctx);
        opt_expr(s.kid(2), ctx);
        return;
      }
      case Kind::Return:
        if (!ctx.in_function) fail(s, "'return' outside function");
        opt_expr(s.kid(0), ctx);
        return;
      case Kind::Delete:
        for (const auto& t : s.kids) del_target(*t, ctx);
        return;
      case Kind::Break:
        if (!ctx.in_loop) fail(s, "'break' outside loop");
        return;
      case Kind::Continue:
        if (!ctx.in_loop) fail(s, "'continue' not properly in loop");
        return;
      case Kind::Raise:
        opt_expr(s.kid(0), ctx);
        opt_expr(s.kid(1), ctx);
        return;
      case Kind::Nonlocal:
        if (ctx.module_level || !ctx.in_function) {
          fail(s, "nonlocal declaration not allowed at module level");
        }
        return;
      case Kind::ImportFrom:
        if (!ctx.module_level && s.kids.size() == 1 && s.kid(0)->text == "*" && ctx.in_function) {
          fail(s, "import * only allowed at module level");
        }
        return;
      case Kind::Assert:
        expr(*s.kid(0), ctx);
        opt_expr(s.kid(1), ctx);
        return;
      case Kind::If:
        expr(*s.kid(0), ctx);
        block(*s.kid(1), ctx);
        clause(s.kid(2), ctx);
        return;
      case Kind::While: {
        expr(*s.kid(0), ctx);
        Ctx loop = ctx;
        loop.in_loop = true;
        block(*s.kid(1), loop);
        clause(s.kid(2), ctx);
        return;
      }
      case Kind::For: {
        if (s.is_async && !ctx.in_async) fail(s, "'async for' outside async function");
        assign_target(*s.kid(0), true, ctx);
        expr(*s.kid(1), ctx);
        Ctx loop = ctx;
        loop.in_loop = true;
        block(*s.kid(2), loop);
        clause(s.kid(3), ctx);
        return;
      }
      case Kind::With:
        if (s.is_async && !ctx.in_async) fail(s, "'async with' outside async function");
        for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) {
          expr(*s.kids[i]->kid(0), ctx);
          if (!s.kids[i]->kid(1)->empty()) assign_target(*s.kids[i]->kid(1), true, ctx);
        }
        block(*s.kids.back(), ctx);
        return;
      case Kind::Try: {
        block(*s.kid(0), ctx);
        const std::size_t n = s.kids.size();
        for (std::size_t i = 1; i + 2 < n; ++i) {
          const Node& h = *s.kids[i];
          if (h.kid(0)->empty() && i + 3 < n) fail(h, "default 'except:' must be last");
          opt_expr(h.kid(0), ctx);
          block(*h.kid(1), ctx);
        }
        clause(s.kids[n - 2], ctx);
        clause(s.kids[n - 1], ctx);
        return;
      }
      case Kind::FunctionDef: {
        for (const auto& d : s.kid(0)->kids) expr(*d, ctx);
        parameters(*s.kid(1), ctx);
        opt_expr(s.kid(2), ctx);
        Ctx fn;
        fn.in_function = true;
        fn.in_async = s.is_async;
        block(*s.kid(3), fn);
        declarations(s.kid(3)->kids, s.kid(1).get());
        return;
      }
      case Kind::ClassDef: {
        for (const auto& d : s.kid(0)->kids) expr(*d, ctx);
        call_args(s.kid(1)->kids, 0, ctx);
        Ctx cls;
        cls.in_function = false;
        block(*s.kid(2), cls);
        declarations(s.kid(2)->kids, nullptr);
        return;
      }
      default:
        return;
    }
  }

  void clause(const NodePtr& c, Ctx ctx) {
    if (c->empty()) return;
    if (c->kind == Kind::If) {
      stmt(*c, ctx);
      return;
    }
    block(*c->kid(0), ctx);
  }

  // ---- expressions --------------------------------------------------------

  void call_args(const std::vector<NodePtr>& args, std::size_t from, Ctx ctx) {
    std::set<std::string> keywords;
    for (std::size_t i = from; i < args.size(); ++i) {
      const Node& a = *args[i];
      if (a.kind == Kind::Keyword) {
        if (!keywords.insert(a.text).second) fail(a, "keyword argument repeated: " + a.text);
      }
      expr(a, ctx);
    }
  }

  void comprehension(const Node& c, Ctx ctx, const char* what) {
    // The first iterable is evaluated in the enclosing scope.
    Ctx inner = ctx;
    inner.comprehension = what;
    bool first = true;
    for (std::size_t i = 1; i < c.kids.size(); ++i) {
      const Node& comp = *c.kids[i];
      if (comp.is_async && !ctx.in_async) {
        fail(comp, "asynchronous comprehension outside of an asynchronous function");
      }
      assign_target(*comp.kid(0), true, inner);
      expr(*comp.kid(1), first ? ctx : inner);
      first = false;
      for (std::size_t j = 2; j < comp.kids.size(); ++j) expr(*comp.kids[j], inner);
    }
    expr(*c.kid(0), inner);
  }

  void expr(const Node& e, Ctx ctx) {
    switch (e.kind) {
      case Kind::Yield:
      case Kind::YieldFrom:
        if (ctx.comprehension) fail(e, std::string("'yield' inside ") + ctx.comprehension);
        if (!ctx.in_function) fail(e, "'yield' outside function");
        break;
      case Kind::Await:
        if (!ctx.in_function) fail(e, "'await' outside function");
        if (!ctx.in_async) fail(e, "'await' outside async function");
        break;
      case Kind::Lambda: {
        parameters(*e.kid(0), ctx);
        Ctx fn;
        fn.in_function = true;
        expr(*e.kid(1), fn);
        return;
      }
      case Kind::ListComp:
        comprehension(e, ctx, "list comprehension");
        return;
      case Kind::SetComp:
        comprehension(e, ctx, "set comprehension");
        return;
      case Kind::DictComp:
        comprehension(e, ctx, "dict comprehension");
        return;
      case Kind::GeneratorExp:
        comprehension(e, ctx, "generator expression");
        return;
      case Kind::Call:
        expr(*e.kid(0), ctx);
        call_args(e.kids, 1, ctx);
        return;
      case Kind::NamedExpr:
        expr(*e.kid(1), ctx);
        return;
      default:
        break;
    }
    for (const auto& k : e.kids) {
      if (!k->empty()) expr(*k, ctx);
    }
  }

  const LineIndex& lines_;
};

}  // namespace

void check_semantics(const SyntaxTree& tree, const LineIndex& lines) {
  Checker(lines).module(tree.module());
}

}  // namespace shortcoder::syntax
