#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shortcoder::syntax {

/// Byte range [begin, end) into the source text.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  bool operator==(const Span&) const = default;
  bool contains(const Span& other) const { return begin <= other.begin && other.end <= end; }
};

/// Raised for any source that is not a valid Python 3 module, and for text
/// the tokenizer cannot lex. `line` is 1-based, `column` is 0-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column);

  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

enum class TokenKind : std::uint8_t {
  Name,
  Number,
  String,
  Op,
  Newline,
  Indent,
  Dedent,
  Nl,
  Comment,
  EndMarker,
};

struct Token {
  TokenKind kind;
  std::string_view text;  // view into the lexed source
  Span span;
  int line = 1;    // 1-based
  int column = 0;  // 0-based byte column
  bool own_line = false;  // comments only: nothing but whitespace precedes it on its line
};

/// Tokenizes Python 3 source following the CPython tokenizer's layout
/// rules: INDENT/DEDENT bookkeeping, implicit line joining inside brackets,
/// backslash continuation, and NL for blank or comment-only lines.
/// Token views point into `source`, which must outlive the result.
std::vector<Token> tokenize(std::string_view source);

/// Number of tokens that carry program structure: everything except NL,
/// COMMENT and ENDMARKER.
std::size_t count_significant(const std::vector<Token>& tokens);

/// Maps byte offsets back to 1-based line / 0-based column.
class LineIndex {
 public:
  explicit LineIndex(std::string_view source);
  std::pair<int, int> locate(std::uint32_t offset) const;

 private:
  std::vector<std::uint32_t> line_starts_;
};

bool is_keyword(std::string_view word);

}  // namespace shortcoder::syntax
