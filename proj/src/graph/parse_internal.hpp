// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codewiki/graph/extract.hpp"
#include "codewiki/graph/lexer.hpp"

namespace codewiki::graph::detail {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Component under construction; token indices refer to ParseState::tokens.
struct Draft {
  ParsedComponent pc;
  std::size_t span_first = 0;  // first token of the definition
  std::size_t span_last = 0;   // last token (inclusive)
  std::size_t body_first = 0;  // own-token scan range [body_first, body_end)
  std::size_t body_end = 0;
  std::string name;
  std::vector<std::size_t> children;
};

struct ParseState {
  const SourceUnit& unit;
  std::vector<Token> tokens;
  std::vector<std::size_t> partner;  // matching bracket index, npos otherwise
  std::vector<Draft> drafts;
  ParsedUnit out;

  explicit ParseState(const SourceUnit& u);

  const Token& tok(std::size_t i) const { return tokens[i]; }
  bool at(std::size_t i, std::string_view text) const { return i < tokens.size() && tokens[i].text == text; }

  /// Records a definition; returns its draft index.
  std::size_t add(std::string name, ComponentKind kind, std::vector<std::string> scope,
                  std::optional<std::size_t> parent, bool in_function, std::size_t span_first,
                  std::size_t span_last, std::size_t body_first, std::size_t body_end);
};

void parse_python(ParseState& st);
void parse_brace_family(ParseState& st);

bool is_keyword(Language lang, std::string_view word);

/// Python `import`/`from` statement over tokens [first, last).
std::vector<ImportBinding> parse_python_import(const ParseState& st, std::size_t first, std::size_t last);

/// `const x = require('m')` and `const { a, b: c } = require('m')` over [first, last).
std::vector<ImportBinding> parse_js_require(const ParseState& st, std::size_t first, std::size_t last);

}  // namespace codewiki::graph::detail
