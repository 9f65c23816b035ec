#include <algorithm>
#include <array>
#include <optional>

#include "shortcoder/syntax/syntax.hpp"

namespace shortcoder::syntax {

void check_semantics(const SyntaxTree& tree, const LineIndex& lines);

namespace {

constexpr std::array<std::string_view, 13> kAugOps = {
    "+=", "-=", "*=", "/=", "//=", "%=", "**=", "<<=", ">>=", "&=", "|=", "^=", "@="};

class Parser {
 public:
  explicit Parser(std::string_view source) : src_(source), lines_(source) {
    for (const Token& t : tokenize(source)) {
      if (t.kind == TokenKind::Comment) {
        comments_.push_back(t);
      } else if (t.kind != TokenKind::Nl) {
        toks_.push_back(t);
      }
    }
  }

  SyntaxTree parse() {
    std::vector<NodePtr> body;
    while (!at(TokenKind::EndMarker)) {
      if (at(TokenKind::Newline)) {
        advance();
        continue;
      }
      parse_statement_into(body);
    }
    auto module = make_node(Kind::Module, std::move(body), {},
                            Span{0, static_cast<std::uint32_t>(src_.size())});
    Trivia trivia;
    for (; next_comment_ < comments_.size(); ++next_comment_) {
      trivia.after.emplace_back(comments_[next_comment_].text);
    }
    SyntaxTree tree(with_trivia(*module, std::move(trivia)), std::string(src_));
    check_semantics(tree, lines_);
    return tree;
  }

 private:
  // ---- token cursor -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(TokenKind kind) const { return peek().kind == kind; }
  bool at_op(std::string_view op, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Op && t.text == op;
  }
  bool at_kw(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Name && t.text == kw;
  }
  const Token& advance() {
    const Token& t = toks_[pos_];
    last_end_ = t.span.end;
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool eat_op(std::string_view op) {
    if (!at_op(op)) return false;
    advance();
    return true;
  }
  bool eat_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    advance();
    return true;
  }
  void expect_op(std::string_view op) {
    if (!eat_op(op)) fail("expected '" + std::string(op) + "'");
  }
  void expect_kw(std::string_view kw) {
    if (!eat_kw(kw)) fail("expected '" + std::string(kw) + "'");
  }
  [[noreturn]] void fail(const std::string& msg = "invalid syntax") const {
    const Token& t = peek();
    // Errors found while closing blocks at end of input point at the last NEWLINE.
    if ((t.kind == TokenKind::Dedent || t.kind == TokenKind::EndMarker) &&
        t.span.begin == toks_.back().span.begin) {
      for (std::size_t i = pos_; i-- > 0;) {
        if (toks_[i].kind == TokenKind::Newline) throw ParseError(msg, toks_[i].line, toks_[i].column);
      }
    }
    throw ParseError(msg, t.line, t.column);
  }
  std::string expect_name() {
    if (!at(TokenKind::Name) || is_keyword(peek().text)) fail();
    return std::string(advance().text);
  }

  std::uint32_t start() const { return peek().span.begin; }
  Span span_from(std::uint32_t begin) const { return Span{begin, std::max(begin, last_end_)}; }

  NodePtr node(Kind kind, std::uint32_t begin, std::vector<NodePtr> kids = {},
               std::string text = {}) const {
    return make_node(kind, std::move(kids), std::move(text), span_from(begin));
  }

  // ---- comments -----------------------------------------------------------

  std::vector<Token> take_comments(std::uint32_t before_offset) {
    std::vector<Token> out;
    while (next_comment_ < comments_.size() &&
           comments_[next_comment_].span.begin < before_offset) {
      out.push_back(comments_[next_comment_++]);
    }
    return out;
  }

  std::vector<std::string> take_leading(std::uint32_t before_offset) {
    std::vector<std::string> out;
    for (const Token& c : take_comments(before_offset)) out.emplace_back(c.text);
    return out;
  }

  // Splits comments gathered up to a NEWLINE into the end-of-line comment and
  // comments that sat inside a multi-line construct.
  void split_line_comments(const std::vector<Token>& cs, Trivia& trivia) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const bool last = i + 1 == cs.size();
      if (last && !cs[i].own_line) {
        trivia.eol = std::string(cs[i].text);
      } else {
        trivia.before.emplace_back(cs[i].text);
      }
    }
  }

  // ---- statements ---------------------------------------------------------

  void parse_statement_into(std::vector<NodePtr>& out) {
    std::vector<std::string> before = take_leading(start());
    if (starts_compound()) {
      NodePtr stmt = parse_compound();
      Trivia t = stmt->trivia;
      t.before.insert(t.before.begin(), before.begin(), before.end());
      out.push_back(with_trivia(*stmt, std::move(t)));
      return;
    }
    parse_simple_line(out, std::move(before));
  }

  bool starts_compound() const {
    if (at_op("@")) return true;
    if (peek().kind != TokenKind::Name) return false;
    const auto w = peek().text;
    if (w == "async") return at_kw("def", 1) || at_kw("for", 1) || at_kw("with", 1);
    return w == "if" || w == "while" || w == "for" || w == "try" || w == "with" || w == "def" ||
           w == "class";
  }

  void parse_simple_line(std::vector<NodePtr>& out, std::vector<std::string> before) {
    std::vector<NodePtr> line;
    line.push_back(parse_simple_statement());
    while (eat_op(";")) {
      if (at(TokenKind::Newline)) break;
      line.push_back(parse_simple_statement());
    }
    if (!at(TokenKind::Newline)) fail();
    Trivia tail;
    split_line_comments(take_comments(peek().span.begin), tail);
    advance();
    for (std::size_t i = 0; i < line.size(); ++i) {
      Trivia t;
      if (i == 0) t.before = std::move(before);
      if (i + 1 == line.size()) {
        t.before.insert(t.before.end(), tail.before.begin(), tail.before.end());
        t.eol = tail.eol;
      }
      out.push_back(t.empty() ? line[i] : with_trivia(*line[i], std::move(t)));
    }
  }

  NodePtr parse_simple_statement() {
    const std::uint32_t b = start();
    if (peek().kind == TokenKind::Name) {
      const auto w = peek().text;
      if (w == "pass" || w == "break" || w == "continue") {
        advance();
        return node(w == "pass" ? Kind::Pass : w == "break" ? Kind::Break : Kind::Continue, b);
      }
      if (w == "return") {
        advance();
        NodePtr value = at_simple_end() ? make_empty() : parse_star_expressions();
        return node(Kind::Return, b, {value});
      }
      if (w == "del") {
        advance();
        NodePtr targets = parse_star_expressions();
        std::vector<NodePtr> kids;
        if (targets->kind == Kind::Tuple) {
          kids = targets->kids;
        } else {
          kids.push_back(targets);
        }
        return node(Kind::Delete, b, std::move(kids));
      }
      if (w == "raise") {
        advance();
        NodePtr exc = make_empty();
        NodePtr cause = make_empty();
        if (!at_simple_end()) {
          exc = parse_expression();
          if (eat_kw("from")) cause = parse_expression();
        }
        return node(Kind::Raise, b, {exc, cause});
      }
      if (w == "global" || w == "nonlocal") {
        advance();
        std::vector<NodePtr> names;
        do {
          const std::uint32_t nb = start();
          std::string id = expect_name();
          names.push_back(make_name(std::move(id), span_from(nb)));
        } while (eat_op(","));
        return node(w == "global" ? Kind::Global : Kind::Nonlocal, b, std::move(names));
      }
      if (w == "import") return parse_import(b);
      if (w == "from") return parse_from_import(b);
      if (w == "assert") {
        advance();
        NodePtr test = parse_expression();
        NodePtr msg = eat_op(",") ? parse_expression() : make_empty();
        return node(Kind::Assert, b, {test, msg});
      }
    }
    return parse_expression_statement(b);
  }

  bool at_simple_end() const { return at(TokenKind::Newline) || at_op(";"); }

  std::string parse_dotted_name() {
    std::string name = expect_name();
    while (at_op(".")) {
      advance();
      name += "." + expect_name();
    }
    return name;
  }

  NodePtr parse_import(std::uint32_t b) {
    expect_kw("import");
    std::vector<NodePtr> aliases;
    do {
      const std::uint32_t ab = start();
      auto alias = std::make_shared<Node>();
      alias->kind = Kind::Alias;
      alias->text = parse_dotted_name();
      if (eat_kw("as")) alias->aux = expect_name();
      alias->span = span_from(ab);
      aliases.push_back(alias);
    } while (eat_op(","));
    return node(Kind::Import, b, std::move(aliases));
  }

  NodePtr parse_from_import(std::uint32_t b) {
    expect_kw("from");
    std::string module;
    while (at_op(".") || at_op("...")) module += std::string(advance().text);
    if (!at_kw("import")) module += parse_dotted_name();
    expect_kw("import");
    std::vector<NodePtr> aliases;
    if (at_op("*")) {
      const std::uint32_t ab = start();
      advance();
      aliases.push_back(node(Kind::Alias, ab, {}, "*"));
      return node(Kind::ImportFrom, b, std::move(aliases), module);
    }
    const bool parens = eat_op("(");
    do {
      if (parens && at_op(")")) break;
      const std::uint32_t ab = start();
      auto alias = std::make_shared<Node>();
      alias->kind = Kind::Alias;
      alias->text = expect_name();
      if (eat_kw("as")) alias->aux = expect_name();
      alias->span = span_from(ab);
      aliases.push_back(alias);
    } while (eat_op(","));
    if (parens) expect_op(")");
    if (aliases.empty()) fail();
    if (!parens && last_was_comma()) fail("trailing comma not allowed without surrounding parentheses");
    return node(Kind::ImportFrom, b, std::move(aliases), module);
  }

  bool last_was_comma() const {
    return pos_ > 0 && toks_[pos_ - 1].kind == TokenKind::Op && toks_[pos_ - 1].text == ",";
  }

  NodePtr parse_expression_statement(std::uint32_t b) {
    NodePtr first = parse_star_expressions_or_yield();
    if (at_op(":")) {
      advance();
      NodePtr annotation = parse_expression();
      NodePtr value = make_empty();
      if (eat_op("=")) value = parse_star_expressions_or_yield();
      return node(Kind::AnnAssign, b, {first, annotation, value});
    }
    for (auto op : kAugOps) {
      if (at_op(op)) {
        advance();
        NodePtr value = parse_star_expressions_or_yield();
        return node(Kind::AugAssign, b, {first, value}, std::string(op));
      }
    }
    if (at_op("=")) {
      std::vector<NodePtr> parts{first};
      while (eat_op("=")) parts.push_back(parse_star_expressions_or_yield());
      return node(Kind::Assign, b, std::move(parts));
    }
    return node(Kind::ExprStmt, b, {first});
  }

  NodePtr parse_compound() {
    const std::uint32_t b = start();
    if (at_op("@")) return parse_decorated(b);
    if (at_kw("async")) {
      advance();
      NodePtr inner = at_kw("def") ? parse_funcdef(b, make_node(Kind::Decorators))
                      : at_kw("for") ? parse_for(b)
                                     : parse_with(b);
      auto n = std::make_shared<Node>(*inner);
      n->is_async = true;
      return n;
    }
    const auto w = peek().text;
    if (w == "if") return parse_if(b);
    if (w == "while") return parse_while(b);
    if (w == "for") return parse_for(b);
    if (w == "try") return parse_try(b);
    if (w == "with") return parse_with(b);
    if (w == "def") return parse_funcdef(b, make_node(Kind::Decorators));
    return parse_classdef(b, make_node(Kind::Decorators));
  }

  // Parses ':' and the suite that follows; header comments land in `header`.
  NodePtr parse_suite(Trivia& header) {
    expect_op(":");
    const std::uint32_t b = start();
    if (!at(TokenKind::Newline)) {
      std::vector<NodePtr> stmts;
      parse_simple_line(stmts, {});
      return node(Kind::Block, b, std::move(stmts));
    }
    split_line_comments(take_comments(peek().span.begin), header);
    advance();
    if (!at(TokenKind::Indent)) fail("expected an indented block");
    advance();
    std::vector<NodePtr> stmts;
    while (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker)) parse_statement_into(stmts);
    if (at(TokenKind::Dedent)) advance();
    return node(Kind::Block, b, std::move(stmts));
  }

  NodePtr finish(Kind kind, std::uint32_t b, std::vector<NodePtr> kids, Trivia trivia,
                 std::string text = {}) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->kids = std::move(kids);
    n->text = std::move(text);
    n->span = span_from(b);
    n->trivia = std::move(trivia);
    return n;
  }

  NodePtr parse_else_clause() {
    std::vector<std::string> before = take_leading(start());
    const std::uint32_t b = start();
    expect_kw("else");
    Trivia t;
    t.before = std::move(before);
    NodePtr body = parse_suite(t);
    return finish(Kind::Else, b, {body}, std::move(t));
  }

  bool next_clause_is(std::string_view kw) const { return at_kw(kw); }

  NodePtr parse_if(std::uint32_t b, std::vector<std::string> before = {}) {
    advance();  // 'if' or 'elif'
    NodePtr test = parse_named_expression();
    Trivia t;
    t.before = std::move(before);
    NodePtr body = parse_suite(t);
    NodePtr orelse = make_empty();
    if (at_kw("elif")) {
      std::vector<std::string> lead = take_leading(start());
      orelse = parse_if(start(), std::move(lead));
    } else if (at_kw("else")) {
      orelse = parse_else_clause();
    }
    return finish(Kind::If, b, {test, body, orelse}, std::move(t));
  }

  NodePtr parse_while(std::uint32_t b) {
    advance();
    NodePtr test = parse_named_expression();
    Trivia t;
    NodePtr body = parse_suite(t);
    NodePtr orelse = at_kw("else") ? parse_else_clause() : make_empty();
    return finish(Kind::While, b, {test, body, orelse}, std::move(t));
  }

  NodePtr parse_for(std::uint32_t b) {
    expect_kw("for");
    NodePtr target = parse_target_list();
    expect_kw("in");
    NodePtr iter = parse_star_expressions();
    Trivia t;
    NodePtr body = parse_suite(t);
    NodePtr orelse = at_kw("else") ? parse_else_clause() : make_empty();
    return finish(Kind::For, b, {target, iter, body, orelse}, std::move(t));
  }

  NodePtr parse_try(std::uint32_t b) {
    advance();
    Trivia t;
    NodePtr body = parse_suite(t);
    std::vector<NodePtr> kids{body};
    while (at_kw("except")) {
      std::vector<std::string> before = take_leading(start());
      const std::uint32_t hb = start();
      advance();
      NodePtr type = make_empty();
      std::string name;
      if (!at_op(":")) {
        type = parse_expression();
        if (eat_kw("as")) name = expect_name();
      }
      Trivia ht;
      ht.before = std::move(before);
      NodePtr hbody = parse_suite(ht);
      auto h = finish(Kind::ExceptHandler, hb, {type, hbody}, std::move(ht));
      auto hn = std::make_shared<Node>(*h);
      hn->aux = std::move(name);
      kids.push_back(hn);
    }
    const bool has_handlers = kids.size() > 1;
    NodePtr orelse = make_empty();
    if (at_kw("else")) {
      if (!has_handlers) fail();
      orelse = parse_else_clause();
    }
    NodePtr fin = make_empty();
    if (at_kw("finally")) {
      std::vector<std::string> before = take_leading(start());
      const std::uint32_t fb = start();
      advance();
      Trivia ft;
      ft.before = std::move(before);
      NodePtr fbody = parse_suite(ft);
      fin = finish(Kind::Finally, fb, {fbody}, std::move(ft));
    }
    if (!has_handlers && fin->empty()) fail("expected 'except' or 'finally' block");
    kids.push_back(orelse);
    kids.push_back(fin);
    return finish(Kind::Try, b, std::move(kids), std::move(t));
  }

  NodePtr parse_with_item() {
    const std::uint32_t b = start();
    NodePtr ctx = parse_expression();
    NodePtr target = make_empty();
    if (eat_kw("as")) target = parse_target();
    return node(Kind::WithItem, b, {ctx, target});
  }

  NodePtr parse_with(std::uint32_t b) {
    expect_kw("with");
    std::vector<NodePtr> items;
    bool parsed = false;
    if (at_op("(")) {
      // Parenthesized item list: `with (a as b, c as d):`.
      const std::size_t save_pos = pos_;
      const std::size_t save_comment = next_comment_;
      const std::uint32_t save_end = last_end_;
      try {
        advance();
        std::vector<NodePtr> tmp;
        do {
          if (at_op(")")) break;
          tmp.push_back(parse_with_item());
        } while (eat_op(","));
        expect_op(")");
        if (at_op(":") && !tmp.empty()) {
          items = std::move(tmp);
          parsed = true;
        }
      } catch (const ParseError&) {
      }
      if (!parsed) {
        pos_ = save_pos;
        next_comment_ = save_comment;
        last_end_ = save_end;
      }
    }
    if (!parsed) {
      do {
        items.push_back(parse_with_item());
      } while (eat_op(","));
    }
    Trivia t;
    NodePtr body = parse_suite(t);
    items.push_back(body);
    return finish(Kind::With, b, std::move(items), std::move(t));
  }

  NodePtr parse_decorated(std::uint32_t b) {
    std::vector<NodePtr> decos;
    std::vector<std::string> inner;
    while (at_op("@")) {
      advance();
      decos.push_back(parse_named_expression());
      if (!at(TokenKind::Newline)) fail();
      for (const Token& c : take_comments(peek().span.begin)) inner.emplace_back(c.text);
      advance();
      for (const Token& c : take_comments(start())) inner.emplace_back(c.text);
    }
    NodePtr decorators = node(Kind::Decorators, b, std::move(decos));
    NodePtr def;
    const std::uint32_t db = start();
    if (at_kw("async") && at_kw("def", 1)) {
      advance();
      def = parse_funcdef(db, decorators);
      auto n = std::make_shared<Node>(*def);
      n->is_async = true;
      def = n;
    } else if (at_kw("def")) {
      def = parse_funcdef(db, decorators);
    } else if (at_kw("class")) {
      def = parse_classdef(db, decorators);
    } else {
      fail();
    }
    auto n = std::make_shared<Node>(*def);
    n->span.begin = b;
    n->trivia.before.insert(n->trivia.before.begin(), inner.begin(), inner.end());
    return n;
  }

  NodePtr parse_funcdef(std::uint32_t b, NodePtr decorators) {
    expect_kw("def");
    std::string name = expect_name();
    const std::uint32_t pb = start();
    expect_op("(");
    NodePtr params = parse_parameters(")", true, pb);
    expect_op(")");
    NodePtr returns = make_empty();
    if (eat_op("->")) returns = parse_expression();
    Trivia t;
    NodePtr body = parse_suite(t);
    return finish(Kind::FunctionDef, b, {std::move(decorators), params, returns, body},
                  std::move(t), std::move(name));
  }

  NodePtr parse_classdef(std::uint32_t b, NodePtr decorators) {
    expect_kw("class");
    std::string name = expect_name();
    const std::uint32_t ab = start();
    std::vector<NodePtr> args;
    if (eat_op("(")) args = parse_call_args();
    NodePtr arguments = node(Kind::Arguments, ab, std::move(args));
    Trivia t;
    NodePtr body = parse_suite(t);
    return finish(Kind::ClassDef, b, {std::move(decorators), arguments, body}, std::move(t),
                  std::move(name));
  }

  NodePtr parse_parameters(std::string_view closing, bool annotations, std::uint32_t b) {
    std::vector<NodePtr> params;
    bool seen_default = false;
    bool seen_star = false;
    while (!at_op(closing)) {
      const std::uint32_t pb = start();
      if (at_op("/")) {
        advance();
        params.push_back(node(Kind::PosOnlyMarker, pb));
      } else if (at_op("**")) {
        advance();
        params.push_back(parse_param(pb, "**", annotations, false));
      } else if (at_op("*")) {
        advance();
        seen_star = true;
        if (at_op(",") || at_op(closing)) {
          if (at_op(closing)) fail("named arguments must follow bare *");
          params.push_back(node(Kind::KwOnlyMarker, pb));
        } else {
          params.push_back(parse_param(pb, "*", annotations, false));
        }
      } else {
        NodePtr p = parse_param(pb, "", annotations, true);
        const bool has_default = !p->kid(1)->empty();
        if (!seen_star) {
          if (has_default) seen_default = true;
          else if (seen_default) fail("non-default argument follows default argument");
        }
        params.push_back(p);
      }
      if (!eat_op(",")) break;
    }
    return node(Kind::Parameters, b, std::move(params));
  }

  NodePtr parse_param(std::uint32_t b, std::string_view star, bool annotations,
                      bool allow_default) {
    std::string name = expect_name();
    NodePtr annotation = make_empty();
    if (annotations && eat_op(":")) annotation = parse_expression();
    NodePtr def = make_empty();
    if (allow_default && eat_op("=")) def = parse_expression();
    auto p = std::make_shared<Node>();
    p->kind = Kind::Param;
    p->text = std::move(name);
    p->aux = std::string(star);
    p->kids = {annotation, def};
    p->span = span_from(b);
    return p;
  }

  // ---- expressions --------------------------------------------------------

  bool starts_expression() const {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Name:
        if (!is_keyword(t.text)) return true;
        return t.text == "None" || t.text == "True" || t.text == "False" || t.text == "not" ||
               t.text == "lambda" || t.text == "await" || t.text == "yield";
      case TokenKind::Number:
      case TokenKind::String:
        return true;
      case TokenKind::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" ||
               t.text == "+" || t.text == "~" || t.text == "*" || t.text == "...";
      default:
        return false;
    }
  }

  NodePtr parse_star_expressions_or_yield() {
    if (at_kw("yield")) return parse_yield();
    return parse_star_expressions();
  }

  NodePtr parse_yield() {
    const std::uint32_t b = start();
    expect_kw("yield");
    if (eat_kw("from")) return node(Kind::YieldFrom, b, {parse_expression()});
    if (!starts_expression() || at_kw("yield")) return node(Kind::Yield, b, {make_empty()});
    return node(Kind::Yield, b, {parse_star_expressions()});
  }

  // star_expressions: an unparenthesized tuple when a comma is present.
  NodePtr parse_star_expressions() {
    const std::uint32_t b = start();
    NodePtr first = parse_star_expression();
    if (!at_op(",")) {
      if (first->kind == Kind::Starred) fail("can't use starred expression here");
      return first;
    }
    std::vector<NodePtr> elts{first};
    while (eat_op(",")) {
      if (!starts_expression() || at_kw("yield")) break;
      elts.push_back(parse_star_expression());
    }
    return node(Kind::Tuple, b, std::move(elts));
  }

  NodePtr parse_star_expression() {
    if (at_op("*")) {
      const std::uint32_t b = start();
      advance();
      return node(Kind::Starred, b, {parse_bitwise_or()});
    }
    return parse_expression();
  }

  NodePtr parse_star_named_expression() {
    if (at_op("*")) {
      const std::uint32_t b = start();
      advance();
      return node(Kind::Starred, b, {parse_bitwise_or()});
    }
    return parse_named_expression();
  }

  NodePtr parse_named_expression() {
    if (peek().kind == TokenKind::Name && at_op(":=", 1) && !is_keyword(peek().text)) {
      const std::uint32_t b = start();
      NodePtr target = make_name(std::string(advance().text), span_from(b));
      advance();
      NodePtr value = parse_expression();
      return node(Kind::NamedExpr, b, {target, value});
    }
    NodePtr e = parse_expression();
    if (at_op(":=")) fail("cannot use assignment expressions with this target");
    return e;
  }

  NodePtr parse_expression() {
    if (at_kw("lambda")) return parse_lambda();
    const std::uint32_t b = start();
    NodePtr body = parse_disjunction();
    if (at_kw("if")) {
      advance();
      NodePtr test = parse_disjunction();
      expect_kw("else");
      NodePtr orelse = parse_expression();
      return node(Kind::IfExp, b, {body, test, orelse});
    }
    return body;
  }

  NodePtr parse_lambda() {
    const std::uint32_t b = start();
    expect_kw("lambda");
    NodePtr params = parse_parameters(":", false, start());
    expect_op(":");
    NodePtr body = parse_expression();
    return node(Kind::Lambda, b, {params, body});
  }

  NodePtr parse_bool_chain(std::string_view op, NodePtr (Parser::*operand)()) {
    const std::uint32_t b = start();
    NodePtr first = (this->*operand)();
    if (!at_kw(op)) return first;
    std::vector<NodePtr> values{first};
    while (eat_kw(op)) values.push_back((this->*operand)());
    return node(Kind::BoolOp, b, std::move(values), std::string(op));
  }

  NodePtr parse_disjunction() { return parse_bool_chain("or", &Parser::parse_conjunction); }
  NodePtr parse_conjunction() { return parse_bool_chain("and", &Parser::parse_inversion); }

  NodePtr parse_inversion() {
    if (at_kw("not")) {
      const std::uint32_t b = start();
      advance();
      return node(Kind::UnaryOp, b, {parse_inversion()}, "not");
    }
    return parse_comparison();
  }

  std::optional<std::string> peek_compare_op() const {
    const Token& t = peek();
    if (t.kind == TokenKind::Op) {
      static constexpr std::array<std::string_view, 6> ops = {"<", ">", "==", ">=", "<=", "!="};
      for (auto op : ops) {
        if (t.text == op) return std::string(op);
      }
      return std::nullopt;
    }
    if (t.kind == TokenKind::Name) {
      if (t.text == "in") return "in";
      if (t.text == "not" && at_kw("in", 1)) return "not in";
      if (t.text == "is") return at_kw("not", 1) ? "is not" : "is";
    }
    return std::nullopt;
  }

  NodePtr parse_comparison() {
    const std::uint32_t b = start();
    NodePtr left = parse_bitwise_or();
    std::vector<NodePtr> kids{left};
    while (auto op = peek_compare_op()) {
      const std::uint32_t ob = start();
      advance();
      if (*op == "not in" || *op == "is not") advance();
      NodePtr right = parse_bitwise_or();
      kids.push_back(node(Kind::CompareOp, ob, {right}, *op));
    }
    if (kids.size() == 1) return left;
    return node(Kind::Compare, b, std::move(kids));
  }

  NodePtr parse_binary_level(int level) {
    static constexpr std::array<std::array<std::string_view, 5>, 6> kLevels = {{
        {"|", "", "", "", ""},
        {"^", "", "", "", ""},
        {"&", "", "", "", ""},
        {"<<", ">>", "", "", ""},
        {"+", "-", "", "", ""},
        {"*", "/", "//", "%", "@"},
    }};
    if (level == static_cast<int>(kLevels.size())) return parse_factor();
    const std::uint32_t b = start();
    NodePtr left = parse_binary_level(level + 1);
    for (;;) {
      std::string_view matched;
      for (auto op : kLevels[static_cast<std::size_t>(level)]) {
        if (!op.empty() && at_op(op)) matched = op;
      }
      if (matched.empty()) return left;
      advance();
      NodePtr right = parse_binary_level(level + 1);
      left = node(Kind::BinOp, b, {left, right}, std::string(matched));
    }
  }

  NodePtr parse_bitwise_or() { return parse_binary_level(0); }

  NodePtr parse_factor() {
    if (at_op("-") || at_op("+") || at_op("~")) {
      const std::uint32_t b = start();
      std::string op(advance().text);
      return node(Kind::UnaryOp, b, {parse_factor()}, std::move(op));
    }
    return parse_power();
  }

  NodePtr parse_power() {
    const std::uint32_t b = start();
    NodePtr base = parse_await_primary();
    if (eat_op("**")) {
      NodePtr exp = parse_factor();
      return node(Kind::BinOp, b, {base, exp}, "**");
    }
    return base;
  }

  NodePtr parse_await_primary() {
    if (at_kw("await")) {
      const std::uint32_t b = start();
      advance();
      return node(Kind::Await, b, {parse_primary()});
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    const std::uint32_t b = start();
    NodePtr e = parse_atom();
    for (;;) {
      if (eat_op(".")) {
        std::string attr = expect_name();
        e = node(Kind::Attribute, b, {e}, std::move(attr));
      } else if (at_op("(")) {
        advance();
        std::vector<NodePtr> args{e};
        for (auto& a : parse_call_args()) args.push_back(std::move(a));
        e = node(Kind::Call, b, std::move(args));
      } else if (at_op("[")) {
        advance();
        NodePtr index = parse_slices();
        expect_op("]");
        e = node(Kind::Subscript, b, {e, index});
      } else {
        return e;
      }
    }
  }

  // Called after '('; consumes the closing ')'.
  std::vector<NodePtr> parse_call_args() {
    std::vector<NodePtr> args;
    bool seen_keyword = false;
    bool seen_double_star = false;
    bool has_genexp = false;
    while (!at_op(")")) {
      const std::uint32_t b = start();
      if (at_op("*")) {
        advance();
        if (seen_double_star) fail("iterable argument unpacking follows keyword argument unpacking");
        args.push_back(node(Kind::Starred, b, {parse_expression()}));
      } else if (at_op("**")) {
        advance();
        seen_double_star = true;
        args.push_back(node(Kind::DoubleStarred, b, {parse_expression()}));
      } else if (peek().kind == TokenKind::Name && at_op("=", 1)) {
        std::string name = expect_name();
        advance();
        seen_keyword = true;
        args.push_back(node(Kind::Keyword, b, {parse_expression()}, std::move(name)));
      } else {
        if (seen_keyword || seen_double_star) {
          fail(seen_double_star ? "positional argument follows keyword argument unpacking"
                                : "positional argument follows keyword argument");
        }
        NodePtr e = parse_named_expression();
        if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
          e = node(Kind::GeneratorExp, b, prepend(e, parse_comprehensions()));
          has_genexp = true;
        }
        args.push_back(e);
      }
      if (!eat_op(",")) break;
    }
    expect_op(")");
    if (has_genexp && args.size() > 1) fail("Generator expression must be parenthesized");
    return args;
  }

  static std::vector<NodePtr> prepend(NodePtr first, std::vector<NodePtr> rest) {
    rest.insert(rest.begin(), std::move(first));
    return rest;
  }

  NodePtr parse_slices() {
    const std::uint32_t b = start();
    NodePtr first = parse_slice();
    if (!at_op(",")) return first;
    std::vector<NodePtr> elts{first};
    while (eat_op(",")) {
      if (at_op("]")) break;
      elts.push_back(parse_slice());
    }
    return node(Kind::Tuple, b, std::move(elts));
  }

  NodePtr parse_slice() {
    const std::uint32_t b = start();
    NodePtr lower = make_empty();
    if (!at_op(":")) {
      if (at_op("*")) return parse_star_named_expression();
      lower = parse_named_expression();
      if (!at_op(":")) return lower;
    }
    expect_op(":");
    NodePtr upper = make_empty();
    NodePtr step = make_empty();
    if (!at_op(":") && !at_op("]") && !at_op(",")) upper = parse_expression();
    if (eat_op(":")) {
      if (!at_op("]") && !at_op(",")) step = parse_expression();
    }
    return node(Kind::Slice, b, {lower, upper, step});
  }

  std::vector<NodePtr> parse_comprehensions() {
    std::vector<NodePtr> comps;
    while (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
      const std::uint32_t b = start();
      const bool is_async = eat_kw("async");
      expect_kw("for");
      NodePtr target = parse_target_list();
      expect_kw("in");
      std::vector<NodePtr> kids{target, parse_disjunction()};
      while (eat_kw("if")) kids.push_back(parse_disjunction());
      auto c = std::make_shared<Node>();
      c->kind = Kind::Comprehension;
      c->kids = std::move(kids);
      c->is_async = is_async;
      c->span = span_from(b);
      comps.push_back(c);
    }
    return comps;
  }

  // Loop and comprehension targets: stop before `in`.
  NodePtr parse_target_list() {
    const std::uint32_t b = start();
    NodePtr first = parse_target();
    if (!at_op(",")) return first;
    std::vector<NodePtr> elts{first};
    while (eat_op(",")) {
      if (at_kw("in") || at_op("=")) break;
      elts.push_back(parse_target());
    }
    return node(Kind::Tuple, b, std::move(elts));
  }

  NodePtr parse_target() {
    if (at_op("*")) {
      const std::uint32_t b = start();
      advance();
      return node(Kind::Starred, b, {parse_bitwise_or()});
    }
    return parse_bitwise_or();
  }

  NodePtr parse_atom() {
    const std::uint32_t b = start();
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number:
        advance();
        return node(Kind::Number, b, {}, std::string(t.text));
      case TokenKind::String:
        return parse_strings();
      case TokenKind::Name: {
        if (t.text == "None" || t.text == "True" || t.text == "False") {
          advance();
          return node(Kind::Constant, b, {}, std::string(t.text));
        }
        if (is_keyword(t.text)) fail();
        advance();
        return node(Kind::Name, b, {}, std::string(t.text));
      }
      case TokenKind::Op:
        if (t.text == "...") {
          advance();
          return node(Kind::Constant, b, {}, "...");
        }
        if (t.text == "(") return parse_paren();
        if (t.text == "[") return parse_list();
        if (t.text == "{") return parse_brace();
        break;
      default:
        break;
    }
    fail();
  }

  NodePtr parse_strings() {
    const std::uint32_t b = start();
    std::vector<NodePtr> parts;
    bool bytes = false;
    bool text = false;
    while (at(TokenKind::String)) {
      const std::uint32_t sb = start();
      const Token& t = advance();
      const auto quote = t.text.find_first_of("'\"");
      const auto prefix = t.text.substr(0, quote);
      const bool is_bytes = prefix.find_first_of("bB") != std::string_view::npos;
      (is_bytes ? bytes : text) = true;
      parts.push_back(node(Kind::String, sb, {}, std::string(t.text)));
    }
    if (bytes && text) {
      throw ParseError("cannot mix bytes and nonbytes literals", lines_.locate(b).first,
                       lines_.locate(b).second);
    }
    if (parts.size() == 1) return parts.front();
    return node(Kind::StringConcat, b, std::move(parts));
  }

  NodePtr parse_paren() {
    const std::uint32_t b = start();
    expect_op("(");
    if (eat_op(")")) return node(Kind::Tuple, b);
    if (at_kw("yield")) {
      NodePtr y = parse_yield();
      expect_op(")");
      return node(Kind::Group, b, {y});
    }
    const std::uint32_t ib = start();
    NodePtr first = parse_star_named_expression();
    if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
      if (first->kind == Kind::Starred) fail("iterable unpacking cannot be used in comprehension");
      auto comps = parse_comprehensions();
      expect_op(")");
      return node(Kind::GeneratorExp, b, prepend(first, std::move(comps)));
    }
    if (at_op(",")) {
      std::vector<NodePtr> elts{first};
      while (eat_op(",")) {
        if (at_op(")")) break;
        elts.push_back(parse_star_named_expression());
      }
      NodePtr tuple = node(Kind::Tuple, ib, std::move(elts));
      expect_op(")");
      return node(Kind::Group, b, {tuple});
    }
    if (first->kind == Kind::Starred) fail("cannot use starred expression here");
    expect_op(")");
    return node(Kind::Group, b, {first});
  }

  NodePtr parse_list() {
    const std::uint32_t b = start();
    expect_op("[");
    if (eat_op("]")) return node(Kind::List, b);
    NodePtr first = parse_star_named_expression();
    if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
      if (first->kind == Kind::Starred) fail("iterable unpacking cannot be used in comprehension");
      auto comps = parse_comprehensions();
      expect_op("]");
      return node(Kind::ListComp, b, prepend(first, std::move(comps)));
    }
    std::vector<NodePtr> elts{first};
    while (eat_op(",")) {
      if (at_op("]")) break;
      elts.push_back(parse_star_named_expression());
    }
    expect_op("]");
    return node(Kind::List, b, std::move(elts));
  }

  NodePtr parse_dict_entry() {
    const std::uint32_t b = start();
    if (eat_op("**")) return node(Kind::DoubleStarred, b, {parse_bitwise_or()});
    NodePtr key = parse_expression();
    expect_op(":");
    NodePtr value = parse_expression();
    return node(Kind::DictItem, b, {key, value});
  }

  NodePtr parse_brace() {
    const std::uint32_t b = start();
    expect_op("{");
    if (eat_op("}")) return node(Kind::Dict, b);
    if (at_op("**")) return finish_dict(b, parse_dict_entry());
    const std::uint32_t eb = start();
    NodePtr first = parse_star_named_expression();
    if (first->kind != Kind::Starred && first->kind != Kind::NamedExpr && at_op(":")) {
      advance();
      NodePtr value = parse_expression();
      NodePtr item = node(Kind::DictItem, eb, {first, value});
      if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
        auto comps = parse_comprehensions();
        expect_op("}");
        return node(Kind::DictComp, b, prepend(item, std::move(comps)));
      }
      return finish_dict(b, item);
    }
    if (at_kw("for") || (at_kw("async") && at_kw("for", 1))) {
      if (first->kind == Kind::Starred) fail("iterable unpacking cannot be used in comprehension");
      auto comps = parse_comprehensions();
      expect_op("}");
      return node(Kind::SetComp, b, prepend(first, std::move(comps)));
    }
    std::vector<NodePtr> elts{first};
    while (eat_op(",")) {
      if (at_op("}")) break;
      elts.push_back(parse_star_named_expression());
    }
    expect_op("}");
    return node(Kind::Set, b, std::move(elts));
  }

  NodePtr finish_dict(std::uint32_t b, NodePtr first) {
    std::vector<NodePtr> items{std::move(first)};
    while (eat_op(",")) {
      if (at_op("}")) break;
      items.push_back(parse_dict_entry());
    }
    expect_op("}");
    return node(Kind::Dict, b, std::move(items));
  }

  std::string_view src_;
  LineIndex lines_;
  std::vector<Token> toks_;
  std::vector<Token> comments_;
  std::size_t pos_ = 0;
  std::size_t next_comment_ = 0;
  std::uint32_t last_end_ = 0;
};

}  // namespace

SyntaxTree parse(std::string_view source) { return Parser(source).parse(); }

}  // namespace shortcoder::syntax
