#pragma once

#include <string>
#include <string_view>

#include "shortcoder/syntax/lexer.hpp"
#include "shortcoder/syntax/node.hpp"

namespace shortcoder::syntax {

/// Parses a Python 3 module. Grouping parentheses become Group nodes and
/// comments are kept as statement trivia. Throws ParseError on anything
/// CPython's compiler would reject at the syntax level (including misplaced
/// `return`, `yield`, `break`, `continue` and invalid assignment targets).
SyntaxTree parse(std::string_view source);

/// Canonical source for a tree: 4-space indentation, one statement per line,
/// single spaces around binary operators, parentheses only where a Group node
/// or operator precedence requires them.
std::string render(const SyntaxTree& tree);
std::string render(const NodePtr& module_or_statement);

/// Renders a single expression as it would appear as a statement value.
std::string render_expression(const NodePtr& expr);

/// Copy with Group nodes erased, trivia stripped and spans zeroed.
SyntaxTree normalize(const SyntaxTree& tree);
NodePtr normalize(const NodePtr& node);

/// normalize(a) == normalize(b) structurally.
bool equivalent_modulo_layout(const SyntaxTree& a, const SyntaxTree& b);

}  // namespace shortcoder::syntax
