// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <string_view>

namespace codewiki::graph {

/// Pluggable token counter used for every budget decision.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::size_t count(std::string_view text) const = 0;
};

/// Deterministic byte-pair-style approximation.
///
/// Text is pre-split the way BPE vocabularies typically split code, then each
/// piece is charged a fixed cost:
///   - ASCII letter/underscore run: ceil(len / 4), plus 1 per non-ASCII code point
///   - digit run: ceil(len / 3)
///   - run of one repeated punctuation char: ceil(len / 4); other punctuation: 1 each
///   - horizontal whitespace: a single blank is free (merged into the next
///     piece), longer runs cost ceil(len / 4)
///   - a whitespace run containing newlines: 1, plus ceil(indent / 4) for the
///     blanks that follow the last newline
class ApproxBpeTokenizer final : public Tokenizer {
 public:
  std::size_t count(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

}  // namespace codewiki::graph
