// SPDX-License-Identifier: Apache-2.0
#include "codewiki/graph/lexer.hpp"

#include <array>
#include <string>

namespace codewiki::graph {

namespace {

bool ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}
bool ident_char(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
bool digit(unsigned char c) { return c >= '0' && c <= '9'; }

// Longest first.
constexpr std::array<std::string_view, 30> kPunct = {
    "...", "===", "!==", "<<=", "**=", "->*", "::", "->", "=>", "==", "!=", "<=", ">=", "&&", "||",
    "++",  "--",  "+=",  "-=",  "*=",  "/=",  "%=", "&=", "|=", "^=", "<<", "??", "**", "?.", "##"};

bool regex_allowed_after(const std::vector<Token>& out) {
  if (out.empty()) return true;
  const Token& prev = out.back();
  if (prev.kind == TokenKind::Number || prev.kind == TokenKind::String) return false;
  if (prev.kind == TokenKind::Identifier) {
    static constexpr std::array<std::string_view, 13> kw = {"return", "typeof", "case",  "do",     "else",
                                                            "in",     "of",     "new",   "delete", "void",
                                                            "throw",  "yield",  "await"};
    for (auto k : kw)
      if (prev.text == k) return true;
    return false;
  }
  return !(prev.is(")") || prev.is("]") || prev.is("}"));
}

class Lexer {
 public:
  Lexer(std::string_view src, Language lang) : src_(src), lang_(lang) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) step();
    return std::move(out_);
  }

 private:
  bool brace_family() const { return lang_ != Language::Python; }
  bool js_like() const { return lang_ == Language::JavaScript || lang_ == Language::TypeScript; }
  bool has_preprocessor() const {
    return lang_ == Language::C || lang_ == Language::Cpp || lang_ == Language::CSharp;
  }

  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void newline() {
    ++line_;
    line_begin_ = pos_ + 1;
    at_line_start_ = !continuation_;
    continuation_ = false;
  }

  void advance_over(std::size_t end) {
    while (pos_ < end) {
      if (src_[pos_] == '\n') newline();
      ++pos_;
    }
  }

  void emit(TokenKind kind, std::size_t begin, std::size_t end, std::size_t line, std::size_t col) {
    out_.push_back(Token{kind, src_.substr(begin, end - begin), begin, end, line, col, token_line_start_});
    at_line_start_ = false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at line " + std::to_string(line_));
  }

  void step() {
    const char c = peek();
    if (c == '\n') {
      newline();
      ++pos_;
      return;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++pos_;
      return;
    }
    if (c == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
      continuation_ = true;
      ++pos_;
      return;
    }
    // comments
    if (lang_ == Language::Python && c == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return;
    }
    if (brace_family() && c == '/' && peek(1) == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return;
    }
    if (brace_family() && c == '/' && peek(1) == '*') {
      auto close = src_.find("*/", pos_ + 2);
      if (close == std::string_view::npos) fail("unterminated block comment");
      advance_over(close + 2);
      return;
    }
    if (has_preprocessor() && c == '#' && first_on_line()) {
      skip_preprocessor();
      return;
    }
    const std::size_t begin = pos_;
    const std::size_t line = line_;
    const std::size_t col = pos_ - line_begin_;
    token_line_start_ = at_line_start_;

    if (string_start()) {
      scan_string();
      emit(TokenKind::String, begin, pos_, line, col);
      return;
    }
    if (ident_start(static_cast<unsigned char>(c)) || (js_like() && c == '#' && ident_start(peek(1)))) {
      ++pos_;
      while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      emit(TokenKind::Identifier, begin, pos_, line, col);
      return;
    }
    if (digit(static_cast<unsigned char>(c)) || (c == '.' && digit(static_cast<unsigned char>(peek(1))))) {
      ++pos_;
      while (pos_ < src_.size()) {
        auto d = static_cast<unsigned char>(src_[pos_]);
        if (ident_char(d) || d == '.') {
          ++pos_;
        } else if ((d == '+' || d == '-') && (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E' ||
                                              src_[pos_ - 1] == 'p' || src_[pos_ - 1] == 'P')) {
          ++pos_;
        } else if (d == '\'' && lang_ == Language::Cpp && pos_ + 1 < src_.size() &&
                   ident_char(static_cast<unsigned char>(src_[pos_ + 1]))) {
          ++pos_;  // digit separator
        } else {
          break;
        }
      }
      emit(TokenKind::Number, begin, pos_, line, col);
      return;
    }
    if (js_like() && c == '/' && regex_allowed_after(out_) && scan_regex()) {
      emit(TokenKind::String, begin, pos_, line, col);
      return;
    }
    for (auto p : kPunct) {
      if (src_.substr(pos_, p.size()) == p) {
        if (p == "?." && (!js_like() || digit(static_cast<unsigned char>(peek(2))))) continue;
        pos_ += p.size();
        emit(TokenKind::Punct, begin, pos_, line, col);
        return;
      }
    }
    ++pos_;
    emit(TokenKind::Punct, begin, pos_, line, col);
  }

  bool first_on_line() const {
    for (std::size_t k = line_begin_; k < pos_; ++k)
      if (src_[k] != ' ' && src_[k] != '\t') return false;
    return true;
  }

  void skip_preprocessor() {
    while (pos_ < src_.size()) {
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
        pos_ += 1;
        if (src_[pos_] == '\r') ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '\n') {
          ++line_;
          line_begin_ = pos_ + 1;
        }
        ++pos_;
        continue;
      }
      if (src_[pos_] == '\n') return;
      if (src_[pos_] == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        auto close = src_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) fail("unterminated block comment");
        advance_over(close + 2);
        continue;
      }
      ++pos_;
    }
  }

  // Figures out whether a string literal (with optional prefix) starts here.
  bool string_start() const {
    const char c = peek();
    if (c == '"' || c == '\'') return true;
    if (js_like() && c == '`') return true;
    if (lang_ == Language::Python) {
      std::size_t k = 0;
      while (k < 2 && std::string_view("rRbBuUfF").find(peek(k)) != std::string_view::npos) ++k;
      return k > 0 && (peek(k) == '"' || peek(k) == '\'');
    }
    if (lang_ == Language::CSharp) {
      if ((c == '@' || c == '$') && (peek(1) == '"' || ((peek(1) == '@' || peek(1) == '$') && peek(2) == '"')))
        return true;
    }
    if (lang_ == Language::Cpp || lang_ == Language::C) {
      std::size_t k = 0;
      if (c == 'u' && peek(1) == '8') k = 2;
      else if (c == 'u' || c == 'U' || c == 'L') k = 1;
      if (peek(k) == 'R' && peek(k + 1) == '"') return true;
      if (k > 0 && (peek(k) == '"' || peek(k) == '\'')) return true;
      if (c == 'R' && peek(1) == '"') return true;
    }
    return false;
  }

  void scan_string() {
    if (lang_ == Language::Python) return scan_python_string();
    if (lang_ == Language::CSharp && (peek() == '@' || peek() == '$')) return scan_csharp_string();
    if ((lang_ == Language::Cpp || lang_ == Language::C) && peek() != '"' && peek() != '\'') {
      while (peek() != '"' && peek() != '\'' && peek() != 'R') ++pos_;
      if (peek() == 'R') {
        ++pos_;
        return scan_raw_string();
      }
    }
    if (js_like() && peek() == '`') return scan_template();
    if (lang_ == Language::Java && src_.substr(pos_, 3) == "\"\"\"") return scan_triple('"');
    scan_simple(peek());
  }

  void scan_simple(char quote) {
    ++pos_;
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') newline();
        pos_ += 2;
        continue;
      }
      if (ch == quote) {
        ++pos_;
        return;
      }
      if (ch == '\n') fail("unterminated string literal");
      ++pos_;
    }
    fail("unterminated string literal");
  }

  void scan_triple(char quote) {
    const std::string delim(3, quote);
    pos_ += 3;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') newline();
        pos_ += 2;
        continue;
      }
      if (src_.substr(pos_, 3) == delim) {
        pos_ += 3;
        return;
      }
      if (src_[pos_] == '\n') newline();
      ++pos_;
    }
    fail("unterminated string literal");
  }

  void scan_python_string() {
    bool raw = false;
    while (peek() != '"' && peek() != '\'') {
      if (peek() == 'r' || peek() == 'R') raw = true;
      ++pos_;
    }
    const char q = peek();
    if (src_.substr(pos_, 3) == std::string(3, q)) return scan_triple(q);
    ++pos_;
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '\\') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') newline();
        pos_ += 2;
        continue;
      }
      if (ch == q) {
        ++pos_;
        return;
      }
      if (ch == '\n') fail("unterminated string literal");
      ++pos_;
    }
    (void)raw;
    fail("unterminated string literal");
  }

  void scan_csharp_string() {
    bool verbatim = false;
    while (peek() != '"') {
      if (peek() == '@') verbatim = true;
      ++pos_;
    }
    if (!verbatim) return scan_simple('"');
    ++pos_;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '"') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '"') {
          pos_ += 2;
          continue;
        }
        ++pos_;
        return;
      }
      if (src_[pos_] == '\n') newline();
      ++pos_;
    }
    fail("unterminated string literal");
  }

  void scan_raw_string() {
    // at '"' after R
    ++pos_;
    auto paren = src_.find('(', pos_);
    if (paren == std::string_view::npos) fail("malformed raw string literal");
    std::string close = ")" + std::string(src_.substr(pos_, paren - pos_)) + "\"";
    auto end = src_.find(close, paren + 1);
    if (end == std::string_view::npos) fail("unterminated raw string literal");
    advance_over(end + close.size());
  }

  void scan_template() {
    ++pos_;
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '\\') {
        pos_ += 2;
        continue;
      }
      if (ch == '`') {
        ++pos_;
        return;
      }
      if (ch == '$' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '{') {
        pos_ += 2;
        skip_template_expression();
        continue;
      }
      if (ch == '\n') newline();
      ++pos_;
    }
    fail("unterminated template literal");
  }

  void skip_template_expression() {
    int depth = 1;
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (ch == '{') {
        ++depth;
      } else if (ch == '}') {
        if (--depth == 0) {
          ++pos_;
          return;
        }
      } else if (ch == '`') {
        scan_template();
        continue;
      } else if (ch == '"' || ch == '\'') {
        scan_simple(ch);
        continue;
      } else if (ch == '\n') {
        newline();
      }
      ++pos_;
    }
    fail("unterminated template literal");
  }

  bool scan_regex() {
    std::size_t k = pos_ + 1;
    if (k < src_.size() && (src_[k] == '/' || src_[k] == '*')) return false;
    bool in_class = false;
    while (k < src_.size()) {
      char ch = src_[k];
      if (ch == '\n') return false;
      if (ch == '\\') {
        k += 2;
        continue;
      }
      if (ch == '[') in_class = true;
      else if (ch == ']') in_class = false;
      else if (ch == '/' && !in_class) break;
      ++k;
    }
    if (k >= src_.size()) return false;
    ++k;
    while (k < src_.size() && ident_char(static_cast<unsigned char>(src_[k]))) ++k;
    pos_ = k;
    return true;
  }

  std::string_view src_;
  Language lang_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_begin_ = 0;
  bool at_line_start_ = true;
  bool token_line_start_ = true;
  bool continuation_ = false;
  std::vector<Token> out_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, Language lang) { return Lexer(source, lang).run(); }

}  // namespace codewiki::graph
