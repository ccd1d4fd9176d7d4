// SPDX-License-Identifier: Apache-2.0
#include "codewiki/graph/tokenizer.hpp"

namespace codewiki::graph {

namespace {

constexpr std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_hspace(unsigned char c) { return c == ' ' || c == '\t' || c == '\f' || c == '\v'; }
bool is_space(unsigned char c) { return is_hspace(c) || c == '\n' || c == '\r'; }

}  // namespace

std::size_t ApproxBpeTokenizer::count(std::string_view text) const {
  std::size_t tokens = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      std::size_t ascii = 0, wide = 0;
      while (i < n && is_word_byte(static_cast<unsigned char>(text[i]))) {
        auto b = static_cast<unsigned char>(text[i]);
        if (b < 0x80) {
          ++ascii;
        } else if ((b & 0xC0) != 0x80) {
          ++wide;  // lead byte of a multi-byte code point
        }
        ++i;
      }
      tokens += ceil_div(ascii, 4) + wide;
    } else if (is_digit(c)) {
      std::size_t len = 0;
      while (i < n && is_digit(static_cast<unsigned char>(text[i]))) ++len, ++i;
      tokens += ceil_div(len, 3);
    } else if (is_space(c)) {
      std::size_t newlines = 0, trailing = 0;
      while (i < n && is_space(static_cast<unsigned char>(text[i]))) {
        auto b = static_cast<unsigned char>(text[i]);
        if (b == '\n') {
          ++newlines;
          trailing = 0;
        } else if (b != '\r') {
          ++trailing;
        }
        ++i;
      }
      if (newlines > 0) {
        tokens += 1 + ceil_div(trailing, 4);
      } else if (trailing > 1) {
        tokens += ceil_div(trailing, 4);
      }
    } else {
      std::size_t len = 0;
      while (i < n && static_cast<unsigned char>(text[i]) == c) ++len, ++i;
      tokens += len == 1 ? 1 : ceil_div(len, 4);
    }
  }
  return tokens;
}

const Tokenizer& default_tokenizer() {
  static const ApproxBpeTokenizer instance;
  return instance;
}

}  // namespace codewiki::graph
