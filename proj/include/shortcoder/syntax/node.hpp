#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "shortcoder/syntax/lexer.hpp"

namespace shortcoder::syntax {

// Child layout per kind. "?" marks an optional child; when absent its slot
// holds an Empty node so positions stay fixed.
//
//   Module       stmt*                      Block      stmt*
//   ExprStmt     value                      Assign     target+ value
//   AugAssign    target value (text = "+=") AnnAssign  target annotation value?
//   Return       value?                     Delete     target+
//   Raise        exc? cause?                Assert     test msg?
//   Global       Name+                      Nonlocal   Name+
//   Import       Alias+                     ImportFrom Alias+ (text = module, dots included)
//   Alias        - (text = dotted name, aux = as-name)
//   If           test Block orelse?  where orelse is Else or an If rendered as `elif`
//   While        test Block Else?           For        target iter Block Else?
//   With         WithItem+ Block            WithItem   ctx target?
//   Try          Block ExceptHandler* Else? Finally?
//   ExceptHandler type? Block (aux = bound name)
//   Else/Finally Block
//   FunctionDef  Decorators Parameters returns? Block (text = name)
//   ClassDef     Decorators Arguments Block (text = name)
//   Parameters   (Param | PosOnlyMarker | KwOnlyMarker)*
//   Param        annotation? default? (text = name, aux = "", "*" or "**")
//
//   Name/Number/String/Constant  - (text = source spelling)
//   StringConcat String+         Group      expr (source parentheses)
//   Tuple/List/Set  elt*         Dict       (DictItem | DoubleStarred)*
//   DictItem     key value
//   ListComp/SetComp/GeneratorExp  elt Comprehension+
//   DictComp     DictItem Comprehension+
//   Comprehension target iter cond*
//   BinOp        left right (text = op)     UnaryOp    operand (text = op)
//   BoolOp       operand+ (text = and/or)   Compare    left CompareOp+
//   CompareOp    right (text = op)          IfExp      body test orelse
//   Lambda       Parameters body            NamedExpr  Name value
//   Yield        value?                     YieldFrom  value
//   Await        value                      Call       func arg*
//   Keyword      value (text = name)        Starred    value
//   DoubleStarred value                     Attribute  value (text = attr)
//   Subscript    value index                Slice      lower? upper? step?
//   Arguments    arg*                       Decorators expr*
enum class Kind : std::uint8_t {
  Empty,
  Module,
  Block,
  ExprStmt,
  Assign,
  AugAssign,
  AnnAssign,
  Return,
  Delete,
  Pass,
  Break,
  Continue,
  Raise,
  Global,
  Nonlocal,
  Import,
  ImportFrom,
  Alias,
  Assert,
  If,
  While,
  For,
  With,
  WithItem,
  Try,
  ExceptHandler,
  Else,
  Finally,
  FunctionDef,
  ClassDef,
  Decorators,
  Parameters,
  Param,
  PosOnlyMarker,
  KwOnlyMarker,
  Arguments,
  Name,
  Number,
  String,
  StringConcat,
  Constant,
  Group,
  Tuple,
  List,
  Set,
  Dict,
  DictItem,
  ListComp,
  SetComp,
  GeneratorExp,
  DictComp,
  Comprehension,
  BinOp,
  UnaryOp,
  BoolOp,
  Compare,
  CompareOp,
  IfExp,
  Lambda,
  NamedExpr,
  Yield,
  YieldFrom,
  Await,
  Call,
  Keyword,
  Starred,
  DoubleStarred,
  Attribute,
  Subscript,
  Slice,
};

std::string_view kind_name(Kind kind);
bool is_statement(Kind kind);

/// Comments carried by a statement-like node. `before` holds own-line
/// comments rendered above the node, `eol` the comment that ends its line,
/// and `after` (Module and Block only) comments trailing the last statement.
struct Trivia {
  std::vector<std::string> before;
  std::string eol;
  std::vector<std::string> after;

  bool empty() const { return before.empty() && eol.empty() && after.empty(); }
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable tree node. Rewrites build new nodes and share untouched
/// subtrees, so a NodePtr can be handed across threads freely.
struct Node {
  Kind kind = Kind::Empty;
  std::string text;
  std::string aux;
  bool is_async = false;
  std::vector<NodePtr> kids;
  Span span;
  Trivia trivia;

  const NodePtr& kid(std::size_t i) const { return kids.at(i); }
  bool empty() const { return kind == Kind::Empty; }
};

NodePtr make_node(Kind kind, std::vector<NodePtr> kids = {}, std::string text = {},
                  Span span = {});
NodePtr make_empty();
NodePtr make_name(std::string id, Span span = {});

/// Copy of `node` with replaced children (span, text and trivia kept).
NodePtr with_kids(const Node& node, std::vector<NodePtr> kids);
NodePtr with_trivia(const Node& node, Trivia trivia);

/// Peels any number of Group wrappers.
const NodePtr& strip_groups(const NodePtr& node);

/// Structural equality: kinds, payloads and children; spans and trivia ignored.
bool structurally_equal(const Node& a, const Node& b);
bool structurally_equal(const NodePtr& a, const NodePtr& b);

/// Parsed module plus the text it came from.
class SyntaxTree {
 public:
  SyntaxTree() : root_(make_node(Kind::Module)) {}
  explicit SyntaxTree(NodePtr root, std::string source = {})
      : root_(std::move(root)), source_(std::move(source)) {}

  const NodePtr& root() const { return root_; }
  const Node& module() const { return *root_; }
  const std::string& source() const { return source_; }

 private:
  NodePtr root_;
  std::string source_;
};

/// Pre-order visit of every node below (and including) `node`.
template <typename Fn>
void walk(const NodePtr& node, Fn&& fn) {
  if (!node) return;
  fn(node);
  for (const auto& k : node->kids) walk(k, fn);
}

}  // namespace shortcoder::syntax
