// SPDX-License-Identifier: Apache-2.0
#include <string>
#include <vector>

#include "codewiki/core/text.hpp"
#include "parse_internal.hpp"

namespace codewiki::graph::detail {
namespace {

struct Line {
  std::size_t first;
  std::size_t last;  // exclusive
  std::size_t indent;
};

std::vector<Line> logical_lines(const ParseState& st) {
  std::vector<Line> lines;
  int depth = 0;
  for (std::size_t i = 0; i < st.tokens.size(); ++i) {
    const auto& t = st.tok(i);
    if (depth == 0 && t.line_start) {
      if (!lines.empty()) lines.back().last = i;
      lines.push_back({i, st.tokens.size(), t.col});
    }
    if (lines.empty()) lines.push_back({i, st.tokens.size(), t.col});
    if (t.kind == TokenKind::Punct) {
      if (t.is("(") || t.is("[") || t.is("{")) ++depth;
      else if ((t.is(")") || t.is("]") || t.is("}")) && depth > 0) --depth;
    }
  }
  return lines;
}

// Splits ';'-separated simple statements off a logical line.
std::vector<Line> statements(const ParseState& st, const Line& l) {
  std::vector<Line> out;
  std::size_t start = l.first;
  for (std::size_t i = l.first; i < l.last; ++i) {
    if (st.partner[i] != npos && st.partner[i] > i) {
      i = st.partner[i];
      continue;
    }
    if (st.at(i, ";")) {
      if (i > start) out.push_back({start, i, l.indent});
      start = i + 1;
    }
  }
  if (start < l.last) out.push_back({start, l.last, l.indent});
  return out;
}

std::vector<RawReference> class_bases(const ParseState& st, std::size_t open) {
  std::vector<RawReference> out;
  std::size_t close = st.partner[open];
  std::size_t i = open + 1;
  while (i < close) {
    std::size_t end = i;
    bool kw = false;
    while (end < close && !st.at(end, ",")) {
      if (st.at(end, "=")) kw = true;
      if (st.partner[end] != npos && st.partner[end] > end) end = st.partner[end];
      ++end;
    }
    if (!kw && i < end && st.tok(i).ident()) {
      std::vector<std::string> chain{std::string(st.tok(i).text)};
      std::size_t k = i + 1;
      while (k + 1 < end && st.at(k, ".") && st.tok(k + 1).ident()) {
        chain.emplace_back(st.tok(k + 1).text);
        k += 2;
      }
      RawReference r;
      r.name = chain.back();
      chain.pop_back();
      r.receiver = join(chain, ".");
      r.kind = RawKind::Inheritance;
      out.push_back(std::move(r));
    }
    i = end + 1;
  }
  return out;
}

class PythonParser {
 public:
  explicit PythonParser(ParseState& st) : st_(st), lines_(logical_lines(st)) {}

  void run() { block(0, lines_.size(), {}, std::nullopt, false, false); }

 private:
  // Index of the depth-0 ':' that ends a compound statement header.
  std::size_t header_colon(const Line& l) const {
    for (std::size_t i = l.first; i < l.last; ++i) {
      if (st_.partner[i] != npos && st_.partner[i] > i) {
        i = st_.partner[i];
        continue;
      }
      if (st_.at(i, ":")) return i;
    }
    return npos;
  }

  void block(std::size_t a, std::size_t b, const std::vector<std::string>& scope, std::optional<std::size_t> parent,
             bool in_function, bool in_class) {
    for (std::size_t li = a; li < b; ++li) {
      const Line& l = lines_[li];
      std::size_t h = l.first;
      if (st_.at(h, "async")) ++h;
      const bool is_def = st_.at(h, "def");
      const bool is_class = st_.at(h, "class");
      if (!is_def && !is_class) {
        if (!parent) {
          for (const auto& s : statements(st_, l)) {
            if (st_.at(s.first, "import") || st_.at(s.first, "from")) {
              auto b2 = parse_python_import(st_, s.first, s.last);
              st_.out.imports.insert(st_.out.imports.end(), b2.begin(), b2.end());
            }
          }
        }
        continue;
      }
      if (h + 1 >= l.last || !st_.tok(h + 1).ident()) continue;
      std::string name(st_.tok(h + 1).text);
      std::size_t colon = header_colon(l);
      if (colon == npos) continue;
      std::size_t body_lines_end = li + 1;
      while (body_lines_end < b && lines_[body_lines_end].indent > l.indent) ++body_lines_end;
      std::size_t span_last = body_lines_end > li + 1 ? lines_[body_lines_end - 1].last - 1 : l.last - 1;

      ComponentKind kind = is_class ? ComponentKind::Class : (in_class ? ComponentKind::Method : ComponentKind::Function);
      std::size_t body_first = is_class ? colon + 1 : l.first;
      auto idx = st_.add(name, kind, scope, parent, in_function, l.first, span_last, body_first, span_last + 1);
      if (is_class && st_.at(h + 2, "(")) st_.drafts[idx].pc.bases = class_bases(st_, h + 2);

      auto inner = scope;
      inner.push_back(name);
      block(li + 1, body_lines_end, inner, idx, in_function || is_def, is_class);
      li = body_lines_end - 1;
    }
  }

  ParseState& st_;
  std::vector<Line> lines_;
};

}  // namespace

void parse_python(ParseState& st) { PythonParser(st).run(); }

}  // namespace codewiki::graph::detail
