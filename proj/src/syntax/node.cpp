#include "shortcoder/syntax/node.hpp"

namespace shortcoder::syntax {

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::Empty:
      return "Empty";
    case Kind::Module:
      return "Module";
    case Kind::Block:
      return "Block";
    case Kind::ExprStmt:
      return "ExprStmt";
    case Kind::Assign:
      return "Assign";
    case Kind::AugAssign:
      return "AugAssign";
    case Kind::AnnAssign:
      return "AnnAssign";
    case Kind::Return:
      return "Return";
    case Kind::Delete:
      return "Delete";
    case Kind::Pass:
      return "Pass";
    case Kind::Break:
      return "Break";
    case Kind::Continue:
      return "Continue";
    case Kind::Raise:
      return "Raise";
    case Kind::Global:
      return "Global";
    case Kind::Nonlocal:
      return "Nonlocal";
    case Kind::Import:
      return "Import";
    case Kind::ImportFrom:
      return "ImportFrom";
    case Kind::Alias:
      return "Alias";
    case Kind::Assert:
      return "Assert";
    case Kind::If:
      return "If";
    case Kind::While:
      return "While";
    case Kind::For:
      return "For";
    case Kind::With:
      return "With";
    case Kind::WithItem:
      return "WithItem";
    case Kind::Try:
      return "Try";
    case Kind::ExceptHandler:
      return "ExceptHandler";
    case Kind::Else:
      return "Else";
    case Kind::Finally:
      return "Finally";
    case Kind::FunctionDef:
      return "FunctionDef";
    case Kind::ClassDef:
      return "ClassDef";
    case Kind::Decorators:
      return "Decorators";
    case Kind::Parameters:
      return "Parameters";
    case Kind::Param:
      return "Param";
    case Kind::PosOnlyMarker:
      return "PosOnlyMarker";
    case Kind::KwOnlyMarker:
      return "KwOnlyMarker";
    case Kind::Arguments:
      return "Arguments";
    case Kind::Name:
      return "Name";
    case Kind::Number:
      return "Number";
    case Kind::String:
      return "String";
    case Kind::StringConcat:
      return "StringConcat";
    case Kind::Constant:
      return "Constant";
    case Kind::Group:
      return "Group";
    case Kind::Tuple:
      return "Tuple";
    case Kind::List:
      return "List";
    case Kind::Set:
      return "Set";
    case Kind::Dict:
      return "Dict";
    case Kind::DictItem:
      return "DictItem";
    case Kind::ListComp:
      return "ListComp";
    case Kind::SetComp:
      return "SetComp";
    case Kind::GeneratorExp:
      return "GeneratorExp";
    case Kind::DictComp:
      return "DictComp";
    case Kind::Comprehension:
      return "Comprehension";
    case Kind::BinOp:
      return "BinOp";
    case Kind::UnaryOp:
      return "UnaryOp";
    case Kind::BoolOp:
      return "BoolOp";
    case Kind::Compare:
      return "Compare";
    case Kind::CompareOp:
      return "CompareOp";
    case Kind::IfExp:
      return "IfExp";
    case Kind::Lambda:
      return "Lambda";
    case Kind::NamedExpr:
      return "NamedExpr";
    case Kind::Yield:
      return "Yield";
    case Kind::YieldFrom:
      return "YieldFrom";
    case Kind::Await:
      return "Await";
    case Kind::Call:
      return "Call";
    case Kind::Keyword:
      return "Keyword";
    case Kind::Starred:
      return "Starred";
    case Kind::DoubleStarred:
      return "DoubleStarred";
    case Kind::Attribute:
      return "Attribute";
    case Kind::Subscript:
      return "Subscript";
    case Kind::Slice:
      return "Slice";
  }
  return "?";
}

bool is_statement(Kind kind) {
  switch (kind) {
    case Kind::ExprStmt:
    case Kind::Assign:
    case Kind::AugAssign:
    case Kind::AnnAssign:
    case Kind::Return:
    case Kind::Delete:
    case Kind::Pass:
    case Kind::Break:
    case Kind::Continue:
    case Kind::Raise:
    case Kind::Global:
    case Kind::Nonlocal:
    case Kind::Import:
    case Kind::ImportFrom:
    case Kind::Assert:
    case Kind::If:
    case Kind::While:
    case Kind::For:
    case Kind::With:
    case Kind::Try:
    case Kind::FunctionDef:
    case Kind::ClassDef:
      return true;
    default:
      return false;
  }
}

NodePtr make_node(Kind kind, std::vector<NodePtr> kids, std::string text, Span span) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->kids = std::move(kids);
  n->text = std::move(text);
  n->span = span;
  return n;
}

NodePtr make_empty() {
  static const NodePtr kEmpty = make_node(Kind::Empty);
  return kEmpty;
}

NodePtr make_name(std::string id, Span span) { return make_node(Kind::Name, {}, std::move(id), span); }

NodePtr with_kids(const Node& node, std::vector<NodePtr> kids) {
  auto n = std::make_shared<Node>(node);
  n->kids = std::move(kids);
  return n;
}

NodePtr with_trivia(const Node& node, Trivia trivia) {
  auto n = std::make_shared<Node>(node);
  n->trivia = std::move(trivia);
  return n;
}

const NodePtr& strip_groups(const NodePtr& node) {
  const NodePtr* cur = &node;
  while (*cur && (*cur)->kind == Kind::Group) cur = &(*cur)->kids.front();
  return *cur;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.text != b.text || a.aux != b.aux || a.is_async != b.is_async ||
      a.kids.size() != b.kids.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (!structurally_equal(*a.kids[i], *b.kids[i])) return false;
  }
  return true;
}

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  return a == b || structurally_equal(*a, *b);
}

}  // namespace shortcoder::syntax
