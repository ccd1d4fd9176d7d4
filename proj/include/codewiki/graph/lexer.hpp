// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "codewiki/core/error.hpp"
#include "codewiki/graph/types.hpp"

namespace codewiki::graph {

class ParseError : public Error {
 public:
  using Error::Error;
};

enum class TokenKind { Identifier, Number, String, Punct };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t begin;  // byte offsets into the unit content
  std::size_t end;
  std::size_t line;  // 1-based
  std::size_t col;   // 0-based, in bytes
  bool line_start;   // first token of a physical line (not a continuation)

  bool is(std::string_view s) const { return text == s; }
  bool ident() const { return kind == TokenKind::Identifier; }
};

/// Splits source text into tokens. Comments, whitespace and preprocessor
/// lines are dropped; string, char, template and regex literals each become
/// a single String token. Throws ParseError on unterminated comments or
/// string literals.
std::vector<Token> tokenize(std::string_view source, Language lang);

}  // namespace codewiki::graph
