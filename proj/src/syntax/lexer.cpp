#include "shortcoder/syntax/lexer.hpp"

#include <algorithm>
#include <array>

namespace shortcoder::syntax {

ParseError::ParseError(std::string message, int line, int column)
    : std::runtime_error(message + " (line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ")"),
      message_(std::move(message)),
      line_(line),
      column_(column) {}

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"};

constexpr std::array<std::string_view, 4> kOps3 = {"**=", "//=", ">>=", "<<="};
constexpr std::array<std::string_view, 19> kOps2 = {
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:;.=";

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_string_prefix(std::string_view p) {
  std::string lower(p);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "r" || lower == "u" || lower == "b" || lower == "f" || lower == "br" ||
         lower == "rb" || lower == "fr" || lower == "rf";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = line_start_ = 3;
    while (pos_ < src_.size()) {
      if (at_line_start_ && depth_ == 0 && !continued_) {
        if (!handle_line_start()) break;
        continue;
      }
      at_line_start_ = false;
      continued_ = false;
      lex_one();
    }
    if (!brackets_.empty()) {
      const auto& b = brackets_.front();
      throw ParseError(std::string("'") + b.ch + "' was never closed", b.line, b.column);
    }
    if (logical_has_tokens_) emit(TokenKind::Newline, pos_, pos_);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::Dedent, pos_, pos_);
    }
    emit(TokenKind::EndMarker, pos_, pos_);
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, line_, static_cast<int>(at - std::min(at, line_start_)));
  }

  void emit(TokenKind kind, std::size_t begin, std::size_t end, bool own_line = false) {
    Token t;
    t.kind = kind;
    t.text = src_.substr(begin, end - begin);
    t.span = {static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(end)};
    t.line = token_line_ ? token_line_ : line_;
    t.column = static_cast<int>(begin - token_line_start_);
    t.own_line = own_line;
    out_.push_back(t);
    token_line_ = 0;
    if (kind != TokenKind::Nl && kind != TokenKind::Comment && kind != TokenKind::Newline &&
        kind != TokenKind::Indent && kind != TokenKind::Dedent) {
      logical_has_tokens_ = true;
      physical_has_tokens_ = true;
    }
  }

  std::size_t newline_length(std::size_t at) const {
    if (at >= src_.size()) return 0;
    if (src_[at] == '\n') return 1;
    if (src_[at] == '\r') return (at + 1 < src_.size() && src_[at + 1] == '\n') ? 2 : 1;
    return 0;
  }

  void advance_line(std::size_t after_newline) {
    ++line_;
    line_start_ = after_newline;
    physical_has_tokens_ = false;
  }

  // Returns false at end of input.
  bool handle_line_start() {
    std::size_t p = pos_;
    int col = 0;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == ' ') {
        ++col;
      } else if (c == '\t') {
        col = (col / 8 + 1) * 8;
      } else if (c == '\f') {
        col = 0;
      } else {
        break;
      }
      ++p;
    }
    if (p >= src_.size()) {
      pos_ = p;
      return false;
    }
    token_line_start_ = line_start_;
    if (src_[p] == '#') {
      std::size_t e = p;
      while (e < src_.size() && newline_length(e) == 0) ++e;
      emit(TokenKind::Comment, p, e, true);
      pos_ = e;
      if (std::size_t nl = newline_length(e)) {
        emit(TokenKind::Nl, e, e + nl);
        pos_ = e + nl;
        advance_line(pos_);
      }
      return true;
    }
    if (std::size_t nl = newline_length(p)) {
      emit(TokenKind::Nl, p, p + nl);
      pos_ = p + nl;
      advance_line(pos_);
      return true;
    }
    if (src_[p] == '\\' && newline_length(p + 1)) {
      // A continuation on an otherwise blank line joins with the next line.
      pos_ = p;
      at_line_start_ = false;
      return true;
    }
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::Indent, line_start_, p);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::Dedent, p, p);
      }
      if (col != indents_.back()) fail("unindent does not match any outer indentation level", p);
    }
    pos_ = p;
    at_line_start_ = false;
    return true;
  }

  void lex_one() {
    token_line_start_ = line_start_;
    const char c = src_[pos_];
    if (c == ' ' || c == '\t' || c == '\f') {
      ++pos_;
      return;
    }
    if (c == '#') {
      std::size_t e = pos_;
      while (e < src_.size() && newline_length(e) == 0) ++e;
      emit(TokenKind::Comment, pos_, e, !physical_has_tokens_);
      pos_ = e;
      return;
    }
    if (std::size_t nl = newline_length(pos_)) {
      if (depth_ > 0 || !logical_has_tokens_) {
        emit(TokenKind::Nl, pos_, pos_ + nl);
      } else {
        emit(TokenKind::Newline, pos_, pos_ + nl);
        logical_has_tokens_ = false;
      }
      pos_ += nl;
      advance_line(pos_);
      at_line_start_ = true;
      return;
    }
    if (c == '\\') {
      if (std::size_t nl = newline_length(pos_ + 1)) {
        pos_ += 1 + nl;
        advance_line(pos_);
        at_line_start_ = true;
        continued_ = true;
        return;
      }
      fail("unexpected character after line continuation character", pos_);
    }
    const auto uc = static_cast<unsigned char>(c);
    if (is_ident_start(uc)) {
      std::size_t e = pos_;
      while (e < src_.size() && is_ident_char(static_cast<unsigned char>(src_[e]))) ++e;
      if (e < src_.size() && (src_[e] == '\'' || src_[e] == '"') &&
          is_string_prefix(src_.substr(pos_, e - pos_))) {
        lex_string(e);
        return;
      }
      emit(TokenKind::Name, pos_, e);
      pos_ = e;
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(pos_);
      return;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      lex_number();
      return;
    }
    lex_operator();
  }

  void lex_string(std::size_t quote_at) {
    const std::size_t begin = pos_;
    const int begin_line = line_;
    const std::size_t begin_line_start = line_start_;
    const char q = src_[quote_at];
    const bool triple = quote_at + 2 < src_.size() && src_[quote_at + 1] == q && src_[quote_at + 2] == q;
    std::size_t p = quote_at + (triple ? 3 : 1);
    for (;;) {
      if (p >= src_.size()) {
        token_line_ = begin_line;
        throw ParseError(triple ? "unterminated triple-quoted string literal"
                                : "unterminated string literal",
                         begin_line, static_cast<int>(begin - begin_line_start));
      }
      const char c = src_[p];
      if (c == '\\') {
        if (std::size_t nl = newline_length(p + 1)) {
          p += 1 + nl;
          advance_line(p);
        } else {
          p += 2;
        }
        continue;
      }
      if (std::size_t nl = newline_length(p)) {
        if (!triple) {
          throw ParseError("unterminated string literal", begin_line,
                           static_cast<int>(begin - begin_line_start));
        }
        p += nl;
        advance_line(p);
        continue;
      }
      if (c == q) {
        if (!triple) {
          ++p;
          break;
        }
        if (p + 2 < src_.size() && src_[p + 1] == q && src_[p + 2] == q) {
          p += 3;
          break;
        }
      }
      ++p;
    }
    token_line_ = begin_line;
    token_line_start_ = begin_line_start;
    emit(TokenKind::String, begin, p);
    physical_has_tokens_ = true;
    pos_ = p;
  }

  void lex_number() {
    std::size_t p = pos_;
    auto digits = [&](auto pred) {
      while (p < src_.size() && (pred(src_[p]) || (src_[p] == '_' && p + 1 < src_.size() &&
                                                   pred(src_[p + 1])))) {
        ++p;
      }
    };
    if (src_[p] == '0' && p + 1 < src_.size() &&
        std::string_view("xXoObB").find(src_[p + 1]) != std::string_view::npos) {
      const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[p + 1])));
      p += 2;
      if (p < src_.size() && src_[p] == '_') ++p;
      const std::size_t start = p;
      if (base == 'x') digits(is_hex);
      if (base == 'o') digits([](char ch) { return ch >= '0' && ch <= '7'; });
      if (base == 'b') digits([](char ch) { return ch == '0' || ch == '1'; });
      if (p == start) fail("invalid number literal", pos_);
    } else {
      digits(is_digit);
      const std::size_t int_end = p;
      if (p < src_.size() && src_[p] == '.') {
        ++p;
        digits(is_digit);
      }
      if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
        std::size_t q = p + 1;
        if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
        if (q < src_.size() && is_digit(src_[q])) {
          p = q;
          digits(is_digit);
        }
      }
      const bool integer = p == int_end;
      if (p < src_.size() && (src_[p] == 'j' || src_[p] == 'J')) {
        ++p;
      } else if (integer && src_[pos_] == '0' &&
                 src_.substr(pos_, p - pos_).find_first_not_of("0_") != std::string_view::npos) {
        fail("leading zeros in decimal integer literals are not permitted; use an 0o prefix for "
             "octal integers",
             pos_);
      }
    }
    emit(TokenKind::Number, pos_, p);
    pos_ = p;
  }

  void lex_operator() {
    const std::string_view rest = src_.substr(pos_);
    if (rest.substr(0, 3) == "...") {
      emit(TokenKind::Op, pos_, pos_ + 3);
      pos_ += 3;
      return;
    }
    for (auto op : kOps3) {
      if (rest.substr(0, 3) == op) {
        emit(TokenKind::Op, pos_, pos_ + 3);
        pos_ += 3;
        return;
      }
    }
    for (auto op : kOps2) {
      if (rest.substr(0, 2) == op) {
        emit(TokenKind::Op, pos_, pos_ + 2);
        pos_ += 2;
        return;
      }
    }
    const char c = src_[pos_];
    if (kOps1.find(c) == std::string_view::npos) {
      fail(std::string("invalid character '") + c + "'", pos_);
    }
    if (c == '(' || c == '[' || c == '{') {
      brackets_.push_back({c, line_, static_cast<int>(pos_ - line_start_)});
      ++depth_;
    } else if (c == ')' || c == ']' || c == '}') {
      const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
      if (brackets_.empty()) fail(std::string("unmatched '") + c + "'", pos_);
      if (brackets_.back().ch != open) {
        fail(std::string("closing parenthesis '") + c + "' does not match opening parenthesis '" +
                 brackets_.back().ch + "'",
             pos_);
      }
      brackets_.pop_back();
      --depth_;
    }
    emit(TokenKind::Op, pos_, pos_ + 1);
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  std::size_t token_line_start_ = 0;
  int line_ = 1;
  int token_line_ = 0;
  int depth_ = 0;
  struct OpenBracket {
    char ch;
    int line;
    int column;
  };
  std::vector<OpenBracket> brackets_;
  std::vector<int> indents_{0};
  bool at_line_start_ = true;
  bool continued_ = false;
  bool logical_has_tokens_ = false;
  bool physical_has_tokens_ = false;
  std::vector<Token> out_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::size_t count_significant(const std::vector<Token>& tokens) {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) {
    return t.kind != TokenKind::Nl && t.kind != TokenKind::Comment &&
           t.kind != TokenKind::EndMarker;
  }));
}

LineIndex::LineIndex(std::string_view source) {
  line_starts_.push_back(0);
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\n') line_starts_.push_back(static_cast<std::uint32_t>(i + 1));
  }
}

std::pair<int, int> LineIndex::locate(std::uint32_t offset) const {
  auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
  const auto line = static_cast<int>(it - line_starts_.begin());
  return {line, static_cast<int>(offset - line_starts_[static_cast<std::size_t>(line - 1)])};
}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

}  // namespace shortcoder::syntax
