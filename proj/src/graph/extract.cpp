// SPDX-License-Identifier: Apache-2.0
#include "codewiki/graph/extract.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "codewiki/core/text.hpp"
#include "parse_internal.hpp"

namespace codewiki::graph {

using detail::Draft;
using detail::npos;
using detail::ParseState;

std::string RawReference::display() const {
  if (kind == RawKind::Import) return module + ":" + name;
  if (receiver.empty()) return name;
  return receiver + "." + name;
}

namespace detail {

ParseState::ParseState(const SourceUnit& u) : unit(u), tokens(tokenize(u.content, u.language)) {
  partner.assign(tokens.size(), npos);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.kind != TokenKind::Punct) continue;
    if (t.is("(") || t.is("[") || t.is("{")) {
      stack.push_back(i);
    } else if (t.is(")") || t.is("]") || t.is("}")) {
      if (stack.empty()) throw ParseError("unbalanced '" + std::string(t.text) + "' at line " + std::to_string(t.line));
      auto open = stack.back();
      stack.pop_back();
      char expect = tokens[open].text[0] == '(' ? ')' : tokens[open].text[0] == '[' ? ']' : '}';
      if (t.text[0] != expect)
        throw ParseError("mismatched '" + std::string(t.text) + "' at line " + std::to_string(t.line));
      partner[open] = i;
      partner[i] = open;
    }
  }
  if (!stack.empty())
    throw ParseError("unclosed '" + std::string(tokens[stack.back()].text) + "' opened at line " +
                     std::to_string(tokens[stack.back()].line));
  out.path = u.path;
  out.language = u.language;
}

std::size_t ParseState::add(std::string name, ComponentKind kind, std::vector<std::string> scope,
                            std::optional<std::size_t> parent, bool in_function, std::size_t span_first,
                            std::size_t span_last, std::size_t body_first, std::size_t body_end) {
  Draft d;
  d.name = std::move(name);
  d.pc.component.kind = kind;
  d.pc.scope = std::move(scope);
  d.pc.parent = parent;
  d.pc.in_function = in_function;
  d.pc.is_type = kind == ComponentKind::Class || kind == ComponentKind::Struct || kind == ComponentKind::Interface;
  d.span_first = span_first;
  d.span_last = span_last;
  d.body_first = body_first;
  d.body_end = body_end;
  drafts.push_back(std::move(d));
  auto idx = drafts.size() - 1;
  if (parent) drafts[*parent].children.push_back(idx);
  return idx;
}

bool is_keyword(Language lang, std::string_view w) {
  static const std::unordered_set<std::string_view> common = {
      "if",     "for",   "while",  "switch", "catch", "return", "sizeof", "typeof", "new",     "delete",
      "throw",  "else",  "do",     "case",   "try",   "goto",   "break",  "continue", "default", "void",
      "int",    "char",  "float",  "double", "long",  "short",  "bool",   "unsigned", "signed",  "auto",
      "const",  "static", "struct", "class",  "enum",  "union",  "typedef", "function", "var",    "let",
      "await",  "yield", "async",  "in",     "instanceof", "super", "import", "export", "extends", "implements",
      "public", "private", "protected", "this", "null", "true", "false", "operator", "template", "typename",
      "namespace", "using", "decltype", "alignof", "alignas", "static_assert", "noexcept", "constexpr",
      "static_cast", "dynamic_cast", "reinterpret_cast", "const_cast", "typeid", "synchronized", "foreach",
      "lock", "fixed", "nameof", "checked", "unchecked", "is", "as", "base", "defined", "__attribute__",
      "__declspec", "interface", "record", "of", "package", "final", "abstract", "virtual", "override"};
  static const std::unordered_set<std::string_view> python = {
      "if",     "for",   "while", "return", "elif", "else",   "and",    "or",     "not",  "in",
      "is",     "lambda", "with", "assert", "del",  "yield",  "await",  "async",  "def",  "class",
      "import", "from",  "as",    "try",    "except", "finally", "raise", "pass",  "break", "continue",
      "global", "nonlocal", "None", "True", "False", "self", "cls", "super", "match", "case"};
  if (lang == Language::Python) return python.count(w) > 0;
  return common.count(w) > 0;
}

std::vector<ImportBinding> parse_python_import(const ParseState& st, std::size_t first, std::size_t last) {
  std::vector<ImportBinding> out;
  auto dotted = [&](std::size_t& i) {
    std::string s;
    while (i < last && (st.tok(i).is(".") || st.tok(i).is("...") || st.tok(i).ident())) {
      if (st.tok(i).ident() && !s.empty() && s.back() != '.') break;
      if (st.tok(i).is("import")) break;
      s += std::string(st.tok(i).text);
      ++i;
    }
    return s;
  };
  std::size_t i = first;
  if (st.at(i, "import")) {
    ++i;
    while (i < last) {
      auto mod = dotted(i);
      if (mod.empty()) break;
      std::string alias = mod;
      if (st.at(i, "as") && i + 1 < last) {
        alias = std::string(st.tok(i + 1).text);
        i += 2;
      }
      out.push_back({alias, mod, "", false});
      if (st.at(i, ",")) ++i;
      else break;
    }
  } else if (st.at(i, "from")) {
    ++i;
    auto mod = dotted(i);
    if (!st.at(i, "import")) return out;
    ++i;
    while (i < last) {
      if (st.at(i, "(") || st.at(i, ")") || st.at(i, ",")) {
        ++i;
        continue;
      }
      if (st.at(i, "*")) {
        out.push_back({"*", mod, "*", false});
        ++i;
        continue;
      }
      if (!st.tok(i).ident()) break;
      std::string sym(st.tok(i).text);
      std::string alias = sym;
      ++i;
      if (st.at(i, "as") && i + 1 < last) {
        alias = std::string(st.tok(i + 1).text);
        i += 2;
      }
      out.push_back({alias, mod, sym, false});
    }
  }
  return out;
}

std::vector<ImportBinding> parse_js_require(const ParseState& st, std::size_t first, std::size_t last) {
  // (const|let|var) NAME = require('m')   |   (const|let|var) { a, b: c } = require('m')
  std::vector<ImportBinding> out;
  std::size_t i = first;
  if (!(st.at(i, "const") || st.at(i, "let") || st.at(i, "var"))) return out;
  ++i;
  std::vector<std::pair<std::string, std::string>> names;  // alias, symbol
  bool destructured = false;
  if (i < last && st.tok(i).ident()) {
    names.emplace_back(std::string(st.tok(i).text), "");
    ++i;
  } else if (st.at(i, "{")) {
    destructured = true;
    auto close = st.partner[i];
    if (close == npos || close >= last) return out;
    for (std::size_t k = i + 1; k < close; ++k) {
      if (!st.tok(k).ident()) continue;
      std::string sym(st.tok(k).text);
      std::string alias = sym;
      if (st.at(k + 1, ":") && k + 2 < close && st.tok(k + 2).ident()) {
        alias = std::string(st.tok(k + 2).text);
        k += 2;
      }
      names.emplace_back(alias, sym);
    }
    i = close + 1;
  } else {
    return out;
  }
  if (!st.at(i, "=") || !st.at(i + 1, "require") || !st.at(i + 2, "(") || i + 3 >= last ||
      st.tok(i + 3).kind != TokenKind::String)
    return out;
  auto spec = std::string(st.tok(i + 3).text.substr(1, st.tok(i + 3).text.size() - 2));
  for (auto& [alias, sym] : names) out.push_back({alias, spec, destructured ? sym : "", false});
  return out;
}

}  // namespace detail

namespace {

// Own tokens of a draft: its scan range minus the spans of direct children.
std::vector<std::size_t> own_tokens(const ParseState& st, const Draft& d) {
  std::vector<std::pair<std::size_t, std::size_t>> holes;
  for (auto c : d.children) holes.emplace_back(st.drafts[c].span_first, st.drafts[c].span_last);
  std::sort(holes.begin(), holes.end());
  std::vector<std::size_t> out;
  std::size_t h = 0;
  for (std::size_t i = d.body_first; i < d.body_end; ++i) {
    while (h < holes.size() && holes[h].second < i) ++h;
    if (h < holes.size() && holes[h].first <= i && i <= holes[h].second) {
      i = holes[h].second;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

bool is_separator(const Token& t) { return t.is(".") || t.is("?.") || t.is("->") || t.is("::"); }

bool receiver_keyword(std::string_view w) {
  return w == "self" || w == "this" || w == "cls" || w == "super" || w == "base";
}

void scan_references(const ParseState& st, Draft& d, const std::vector<bool>& logical_start) {
  const auto lang = st.unit.language;
  const bool js = lang == Language::JavaScript || lang == Language::TypeScript;
  const bool decl_scope = d.pc.is_type && lang != Language::Python;
  auto own = own_tokens(st, d);
  const std::size_t n = own.size();
  auto T = [&](std::size_t q) -> const Token& { return st.tok(own[q]); };

  // The definition's own name token is not a reference.
  std::size_t first = 0;
  if (!d.pc.is_type) {
    std::string_view bare = d.name;
    if (!bare.empty() && bare.front() == '~') bare.remove_prefix(1);
    for (std::size_t q = 0; q + 1 < n; ++q) {
      if (T(q).text == bare && (T(q + 1).is("(") || T(q + 1).is("=") || T(q + 1).is(":") || T(q + 1).is("<"))) {
        first = q + 1;
        break;
      }
      if (T(q).is("{")) break;
    }
  }

  for (std::size_t q = first; q < n; ++q) {
    const Token& t = T(q);
    if (lang == Language::Python && (t.is("import") || t.is("from")) && logical_start[own[q]]) {
      std::size_t end = q + 1;
      while (end < n && !logical_start[own[end]]) ++end;
      auto bindings = detail::parse_python_import(st, own[q], own[end - 1] + 1);
      for (auto& b : bindings) {
        if (!b.symbol.empty() && b.symbol != "*")
          d.pc.references.push_back({"", b.symbol, RawKind::Import, b.module});
        d.pc.local_imports.push_back(std::move(b));
      }
      q = end - 1;
      continue;
    }
    if (js && (t.is("const") || t.is("let") || t.is("var"))) {
      std::size_t end = q + 1;
      while (end < n && !T(end).is(";") && !(T(end).line_start && end > q + 1 && T(end - 1).is(")"))) ++end;
      auto bindings = detail::parse_js_require(st, own[q], own[std::min(end, n - 1)] + 1);
      for (auto& b : bindings) d.pc.local_imports.push_back(std::move(b));
    }
    if (!t.ident() || t.text.front() == '#') continue;
    const bool prev_sep = q > 0 && is_separator(T(q - 1));
    if (!prev_sep && (detail::is_keyword(lang, t.text) || receiver_keyword(t.text))) continue;
    if (prev_sep && receiver_keyword(t.text)) continue;
    const bool next_sep = q + 1 < n && is_separator(T(q + 1));
    bool is_call = q + 1 < n && T(q + 1).is("(");
    const bool after_new = q > 0 && T(q - 1).is("new");
    if (after_new) is_call = true;
    // Member declarations inside a class body: `double area() const;`, `explicit Foo(int);`
    if (is_call && !after_new && decl_scope && !prev_sep && q > 0) {
      const Token& p = T(q - 1);
      if ((p.ident() && !p.is("return")) || p.is("*") || p.is("&") || p.is("~") || p.is(">") || p.is(";") ||
          p.is("{") || p.is("}") || p.is(":"))
        continue;
    }
    // Definitions that remained inside the own range (e.g. prototypes) are not references.
    if (q > 0 && (T(q - 1).is("def") || T(q - 1).is("function") || T(q - 1).is("class"))) continue;

    std::string receiver;
    if (prev_sep) {
      if (q >= 2 && (T(q - 2).ident())) {
        std::vector<std::string> chain{std::string(T(q - 2).text)};
        std::size_t r = q - 2;
        bool complex = false;
        while (r >= 2 && is_separator(T(r - 1))) {
          if (!T(r - 2).ident()) {
            complex = true;
            break;
          }
          chain.insert(chain.begin(), std::string(T(r - 2).text));
          r -= 2;
        }
        if (!complex && r >= 1 && (T(r - 1).is(")") || T(r - 1).is("]"))) complex = true;
        receiver = complex ? "<expr>" : join(chain, ".");
      } else if (T(q - 1).is("::") && (q < 2 || !(T(q - 2).is(")") || T(q - 2).is(">")))) {
        receiver.clear();  // leading '::' = global scope
      } else {
        receiver = "<expr>";
      }
    }
    if (is_call) {
      d.pc.references.push_back({receiver, std::string(t.text), RawKind::Call, ""});
    } else if (prev_sep && !next_sep && !receiver.empty()) {
      d.pc.references.push_back({receiver, std::string(t.text), RawKind::AttributeAccess, ""});
    }
  }
}

std::vector<bool> python_logical_starts(const ParseState& st) {
  std::vector<bool> out(st.tokens.size(), false);
  int depth = 0;
  for (std::size_t i = 0; i < st.tokens.size(); ++i) {
    const auto& t = st.tokens[i];
    if (depth == 0 && t.line_start) out[i] = true;
    if (t.kind == TokenKind::Punct) {
      if (t.is("(") || t.is("[") || t.is("{")) ++depth;
      else if ((t.is(")") || t.is("]") || t.is("}")) && depth > 0) --depth;
    }
  }
  return out;
}

std::size_t end_line(const Token& t) {
  return t.line + static_cast<std::size_t>(std::count(t.text.begin(), t.text.end(), '\n'));
}

}  // namespace

ParsedUnit parse_unit(const SourceUnit& unit, const Tokenizer& tokenizer) {
  ParseState st(unit);
  if (unit.language == Language::Python) {
    detail::parse_python(st);
  } else {
    detail::parse_brace_family(st);
  }
  std::vector<bool> logical;
  if (unit.language == Language::Python) logical = python_logical_starts(st);

  std::set<std::string> used;
  std::vector<std::string> ids(st.drafts.size());
  for (std::size_t i = 0; i < st.drafts.size(); ++i) {
    auto& d = st.drafts[i];
    auto& c = d.pc.component;
    std::string base = unit.path;
    for (const auto& s : d.pc.scope) base += "::" + s;
    base += "::" + d.name;
    std::string id = base;
    for (int k = 2; used.count(id); ++k) id = base + "~" + std::to_string(k);
    used.insert(id);
    c.id = id;
    c.name = d.name;
    c.file = unit.path;
    const auto& first = st.tok(d.span_first);
    const auto& last = st.tok(d.span_last);
    c.span = {first.line, end_line(last)};
    c.source = unit.content.substr(first.begin, last.end - first.begin);
    c.token_count = tokenizer.count(c.source);
    scan_references(st, d, logical);
  }
  for (auto& d : st.drafts) st.out.components.push_back(std::move(d.pc));
  return std::move(st.out);
}

ExtractResult extract_components(const SourceUnit& unit, const Tokenizer& tokenizer) {
  ExtractResult r;
  try {
    auto parsed = parse_unit(unit, tokenizer);
    for (auto& pc : parsed.components) r.components.push_back(std::move(pc.component));
  } catch (const ParseError& e) {
    r.diagnostics.push_back({unit.path, e.what()});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Index

namespace {
std::string key2(std::string_view a, std::string_view b) {
  std::string k(a);
  k += '\0';
  k += b;
  return k;
}
int family(Language l) {
  switch (l) {
    case Language::C:
    case Language::Cpp: return 0;
    case Language::Java: return 1;
    case Language::CSharp: return 2;
    default: return 3;
  }
}
}  // namespace

ComponentIndex::ComponentIndex(const std::vector<ParsedUnit>& units) {
  for (const auto& u : units) {
    units_.emplace(u.path, &u);
    for (const auto& pc : u.components) by_id_.emplace(pc.component.id, Entry{&u, &pc});
  }
  for (const auto& u : units) {
    for (const auto& pc : u.components) {
      const Entry* e = &by_id_.at(pc.component.id);
      const auto& name = pc.component.name;
      if (pc.parent) {
        members_[key2(u.components[*pc.parent].component.id, name)].push_back(e);
      } else {
        top_level_[key2(u.path, name)].push_back(e);
        if (pc.component.kind != ComponentKind::Method) global_[name].push_back(e);
      }
      if (!pc.scope.empty()) by_qualifier_[key2(pc.scope.back(), name)].push_back(e);
    }
  }
}

const ComponentIndex::Entry* ComponentIndex::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

std::vector<const ComponentIndex::Entry*> ComponentIndex::top_level(std::string_view file,
                                                                    std::string_view name) const {
  auto it = top_level_.find(key2(file, name));
  return it == top_level_.end() ? std::vector<const Entry*>{} : it->second;
}

std::vector<const ComponentIndex::Entry*> ComponentIndex::members(std::string_view class_id,
                                                                  std::string_view name) const {
  auto it = members_.find(key2(class_id, name));
  std::vector<const Entry*> out = it == members_.end() ? std::vector<const Entry*>{} : it->second;
  const Entry* cls = find(class_id);
  if (cls && (cls->unit->language == Language::Cpp || cls->unit->language == Language::C)) {
    // out-of-line definitions: void Foo::bar() { ... }
    for (const Entry* e : qualified(cls->parsed->component.name, name))
      if (!e->parsed->parent && std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  return out;
}

std::vector<const ComponentIndex::Entry*> ComponentIndex::global(std::string_view name, Language lang) const {
  std::vector<const Entry*> out;
  auto it = global_.find(name);
  if (it == global_.end()) return out;
  for (const Entry* e : it->second)
    if (family(e->unit->language) == family(lang)) out.push_back(e);
  return out;
}

std::vector<const ComponentIndex::Entry*> ComponentIndex::qualified(std::string_view qualifier,
                                                                    std::string_view name) const {
  auto it = by_qualifier_.find(key2(qualifier, name));
  return it == by_qualifier_.end() ? std::vector<const Entry*>{} : it->second;
}

const ParsedUnit* ComponentIndex::unit(std::string_view path) const {
  auto it = units_.find(path);
  return it == units_.end() ? nullptr : it->second;
}

// ---------------------------------------------------------------------------
// Resolution

namespace {

using Entry = ComponentIndex::Entry;

std::string dirname(std::string_view p) {
  auto s = p.rfind('/');
  return s == std::string_view::npos ? std::string() : std::string(p.substr(0, s));
}

std::string normalize_path(const std::string& p) {
  std::vector<std::string> parts;
  for (auto& seg : split(p, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
      continue;
    }
    parts.push_back(seg);
  }
  return join(parts, "/");
}

class Resolver {
 public:
  Resolver(const ParsedUnit& unit, const ComponentIndex& index) : unit_(unit), index_(index) {}

  RelationResult run() {
    RelationResult r;
    for (std::size_t i = 0; i < unit_.components.size(); ++i) {
      const auto& pc = unit_.components[i];
      for (const auto& b : pc.bases) emit(r, i, b, RawKind::Inheritance);
      for (const auto& ref : pc.references) emit(r, i, ref, ref.kind);
    }
    return r;
  }

 private:
  void emit(RelationResult& r, std::size_t from, const RawReference& ref, RawKind kind) {
    const auto& id = unit_.components[from].component.id;
    auto target = resolve(from, ref, kind);
    if (target) {
      r.edges.push_back({id, *target, kind});
    } else {
      r.misses.push_back({id, ref.display(), kind});
    }
  }

  const Entry* self_entry(std::size_t idx) const { return index_.find(unit_.components[idx].component.id); }

  static const Entry* pick(const std::vector<const Entry*>& c, bool types_only) {
    for (const Entry* e : c)
      if (!types_only || e->parsed->is_type) return e;
    return nullptr;
  }

  std::optional<std::string> resolve(std::size_t from, const RawReference& ref, RawKind kind) const {
    const Entry* e = self_entry(from);
    if (!e) return std::nullopt;
    const bool types_only = kind == RawKind::Inheritance;
    const Entry* hit = nullptr;
    if (kind == RawKind::Import) {
      if (auto mod = resolve_module(*e->unit, ref.module)) hit = pick(index_.top_level(*mod, ref.name), false);
    } else if (ref.receiver.empty()) {
      hit = resolve_unqualified(*e, ref.name, types_only, kind == RawKind::Inheritance);
    } else {
      hit = resolve_qualified(*e, ref.receiver, ref.name, types_only);
    }
    if (!hit) return std::nullopt;
    return hit->parsed->component.id;
  }

  // -- helpers over entries -------------------------------------------------

  const Entry* parent_of(const Entry& e) const {
    if (!e.parsed->parent) return nullptr;
    return index_.find(e.unit->components[*e.parsed->parent].component.id);
  }

  const Entry* enclosing_type(const Entry& e) const {
    for (const Entry* cur = &e; cur; cur = parent_of(*cur))
      if (cur->parsed->is_type) return cur;
    // C++ out-of-line member definition: qualifier names the class.
    const Entry* top = &e;
    while (parent_of(*top)) top = parent_of(*top);
    if (!top->parsed->is_type && !top->parsed->scope.empty() &&
        (top->unit->language == Language::Cpp || top->unit->language == Language::C)) {
      const auto& cls = top->parsed->scope.back();
      for (const Entry* c : index_.global(cls, top->unit->language))
        if (c->parsed->is_type) return c;
      for (const Entry* c : index_.qualified(top->parsed->scope.size() >= 2 ? top->parsed->scope[top->parsed->scope.size() - 2] : "", cls))
        if (c->parsed->is_type) return c;
    }
    return nullptr;
  }

  const Entry* resolve_base(const Entry& cls, const RawReference& b) const {
    return b.receiver.empty() ? resolve_unqualified(cls, b.name, true, true)
                              : resolve_qualified(cls, b.receiver, b.name, true);
  }

  const Entry* member_with_bases(const Entry& cls, const std::string& name, bool types_only, int depth,
                                 std::set<const Entry*>& seen) const {
    if (depth > 8 || !seen.insert(&cls).second) return nullptr;
    if (const Entry* m = pick(index_.members(cls.parsed->component.id, name), types_only)) return m;
    for (const auto& b : cls.parsed->bases) {
      const Entry* base = resolve_base(cls, b);
      if (base && base != &cls) {
        if (const Entry* m = member_with_bases(*base, name, types_only, depth + 1, seen)) return m;
      }
    }
    return nullptr;
  }

  const Entry* member_with_bases(const Entry& cls, const std::string& name, bool types_only) const {
    std::set<const Entry*> seen;
    return member_with_bases(cls, name, types_only, 0, seen);
  }

  bool class_scope_visible(Language l) const {
    return l == Language::Java || l == Language::CSharp || l == Language::Cpp || l == Language::C;
  }

  std::vector<const ImportBinding*> bindings_for(const Entry& e) const {
    std::vector<const ImportBinding*> out;
    for (const Entry* cur = &e; cur; cur = parent_of(*cur))
      for (const auto& b : cur->parsed->local_imports) out.push_back(&b);
    for (const auto& b : e.unit->imports) out.push_back(&b);
    return out;
  }

  const Entry* resolve_binding_symbol(const ParsedUnit& from, const ImportBinding& b, bool types_only) const {
    const auto lang = from.language;
    if (lang == Language::Java) {
      // import a.b.C;  or  import static a.b.C.m;
      auto parts = split(b.module, '.');
      if (b.symbol.empty()) {
        auto cls = parts.back();
        std::string suffix = join(parts, "/") + ".java";
        for (const Entry* c : index_.global(cls, lang))
          if (ends_with(c->unit->path, suffix) && (!types_only || c->parsed->is_type)) return c;
        auto all = index_.global(cls, lang);
        std::vector<const Entry*> types;
        for (const Entry* c : all)
          if (c->parsed->is_type) types.push_back(c);
        return types.size() == 1 ? types.front() : nullptr;
      }
      ImportBinding cls_binding{parts.back(), b.module, "", false};
      const Entry* cls = resolve_binding_symbol(from, cls_binding, true);
      return cls ? member_with_bases(*cls, b.symbol, types_only) : nullptr;
    }
    auto mod = resolve_module(from, b.module);
    if (!mod) return nullptr;
    std::string sym = b.symbol;
    if (b.is_default) {
      const ParsedUnit* target = index_.unit(*mod);
      if (!target || !target->default_export) return nullptr;
      sym = *target->default_export;
    }
    return pick(index_.top_level(*mod, sym), types_only);
  }

  /// With `from_parent`, the lexical walk starts outside `e` (used for base clauses).
  const Entry* resolve_unqualified(const Entry& e, const std::string& name, bool types_only,
                                   bool from_parent = false) const {
    const auto lang = e.unit->language;
    if (++depth_ > 32) {
      --depth_;
      return nullptr;
    }
    struct Guard {
      int& d;
      ~Guard() { --d; }
    } guard{depth_};
    // 1. lexical scopes, innermost first
    for (const Entry* cur = from_parent ? parent_of(e) : &e; cur; cur = parent_of(*cur)) {
      if (cur->parsed->is_type) {
        if (class_scope_visible(lang))
          if (const Entry* m = member_with_bases(*cur, name, types_only)) return m;
      } else {
        if (const Entry* m = pick(index_.members(cur->parsed->component.id, name), types_only)) return m;
      }
    }
    if (class_scope_visible(lang) && !from_parent) {
      if (const Entry* cls = enclosing_type(e))
        if (const Entry* m = member_with_bases(*cls, name, types_only)) return m;
    }
    // 2. file top level
    if (const Entry* t = pick(index_.top_level(e.unit->path, name), types_only)) return t;
    // 3. imports
    for (const ImportBinding* b : bindings_for(e)) {
      if (b->alias == "*") {
        if (auto mod = resolve_module(*e.unit, b->module))
          if (const Entry* t = pick(index_.top_level(*mod, name), types_only)) return t;
        continue;
      }
      if (b->alias != name) continue;
      if (lang != Language::Java && b->symbol.empty() && !b->is_default) return nullptr;  // module alias
      return resolve_binding_symbol(*e.unit, *b, types_only);
    }
    // 4. language-global namespace
    if (lang == Language::Java || lang == Language::CSharp || lang == Language::C || lang == Language::Cpp) {
      std::vector<const Entry*> cands;
      for (const Entry* c : index_.global(name, lang))
        if (!types_only || c->parsed->is_type) cands.push_back(c);
      if (cands.size() == 1) return cands.front();
      if (cands.size() > 1) {
        std::vector<const Entry*> same_dir;
        auto dir = dirname(e.unit->path);
        for (const Entry* c : cands)
          if (dirname(c->unit->path) == dir) same_dir.push_back(c);
        if (same_dir.size() == 1) return same_dir.front();
      }
    }
    return nullptr;
  }

  const Entry* resolve_qualified(const Entry& e, const std::string& receiver, const std::string& name,
                                 bool types_only) const {
    const auto lang = e.unit->language;
    if (receiver == "<expr>") return nullptr;
    if (receiver == "self" || receiver == "this" || receiver == "cls") {
      const Entry* cls = enclosing_type(e);
      return cls ? member_with_bases(*cls, name, types_only) : nullptr;
    }
    if (receiver == "super" || receiver == "base") {
      const Entry* cls = enclosing_type(e);
      if (!cls) return nullptr;
      for (const auto& b : cls->parsed->bases) {
        const Entry* base = resolve_base(*cls, b);
        if (base)
          if (const Entry* m = member_with_bases(*base, name, types_only)) return m;
      }
      return nullptr;
    }
    auto chain = split(receiver, '.');
    // module alias
    for (const ImportBinding* b : bindings_for(e)) {
      if (b->alias == "*") continue;
      if (b->alias == receiver && b->symbol.empty() && !b->is_default) {
        if (lang == Language::Java) break;
        auto mod = resolve_module(*e.unit, b->module);
        return mod ? pick(index_.top_level(*mod, name), types_only) : nullptr;
      }
      if (lang == Language::Python && chain.size() > 1 && b->alias == chain.front() && b->symbol.empty()) {
        auto mod = resolve_module(*e.unit, b->module + receiver.substr(chain.front().size()));
        return mod ? pick(index_.top_level(*mod, name), types_only) : nullptr;
      }
      if (lang == Language::Python && b->alias == receiver && !b->symbol.empty()) {
        // from pkg import submodule
        auto mod = resolve_module(*e.unit, b->module + (ends_with(b->module, ".") ? "" : ".") + b->symbol);
        if (mod) return pick(index_.top_level(*mod, name), types_only);
      }
    }
    // class-qualified member
    if (chain.size() == 1) {
      if (const Entry* cls = resolve_unqualified(e, chain.front(), true))
        return member_with_bases(*cls, name, types_only);
    }
    // namespace-qualified within this file or an imported module (TS namespaces)
    if (lang == Language::TypeScript || lang == Language::JavaScript) {
      std::optional<std::string> file = e.unit->path;
      for (const ImportBinding* b : bindings_for(e))
        if (b->alias == chain.front() && !b->symbol.empty()) file = resolve_module(*e.unit, b->module);
      if (!file) return nullptr;
      for (const Entry* c : index_.qualified(chain.back(), name))
        if (c->unit->path == *file && (!types_only || c->parsed->is_type)) return c;
      return nullptr;
    }
    // namespace-qualified (C++ ns::f, C# Ns.Cls)
    if (lang == Language::Cpp || lang == Language::C || lang == Language::CSharp) {
      auto cands = index_.qualified(chain.back(), name);
      std::vector<const Entry*> ok;
      for (const Entry* c : cands)
        if (family(c->unit->language) == family(lang) && (!types_only || c->parsed->is_type)) ok.push_back(c);
      if (ok.size() == 1) return ok.front();
    }
    return nullptr;
  }

  // -- module resolution ----------------------------------------------------

  std::optional<std::string> resolve_module(const ParsedUnit& from, const std::string& spec) const {
    switch (from.language) {
      case Language::Python: return resolve_python_module(from.path, spec);
      case Language::JavaScript:
      case Language::TypeScript: return resolve_js_module(from.path, spec);
      default: return std::nullopt;
    }
  }

  std::optional<std::string> python_file_for(const std::string& rel) const {
    for (auto cand : {rel + ".py", rel + "/__init__.py", rel + ".pyi"})
      if (index_.has_file(normalize_path(cand))) return normalize_path(cand);
    return std::nullopt;
  }

  std::optional<std::string> resolve_python_module(const std::string& from, const std::string& spec) const {
    std::size_t dots = 0;
    while (dots < spec.size() && spec[dots] == '.') ++dots;
    std::string rest = spec.substr(dots);
    std::string rel_parts = rest;
    std::replace(rel_parts.begin(), rel_parts.end(), '.', '/');
    if (dots > 0) {
      std::string base = dirname(from);
      for (std::size_t k = 1; k < dots; ++k) base = dirname(base);
      std::string rel = base.empty() ? rel_parts : (rel_parts.empty() ? base : base + "/" + rel_parts);
      if (rel_parts.empty()) return python_file_for(base.empty() ? "__init__" : base + "/__init__")
                                        ? std::optional<std::string>(normalize_path((base.empty() ? std::string() : base + "/") + "__init__.py"))
                                        : std::nullopt;
      return python_file_for(rel);
    }
    if (rel_parts.empty()) return std::nullopt;
    if (auto f = python_file_for(rel_parts)) return f;
    auto dir = dirname(from);
    if (!dir.empty())
      if (auto f = python_file_for(dir + "/" + rel_parts)) return f;
    return suffix_match(rel_parts);
  }

  std::optional<std::string> suffix_match(const std::string& rel) const {
    std::vector<std::string> hits;
    for (const auto& cand : {rel + ".py", rel + "/__init__.py"}) {
      for (const auto& [path, u] : units_paths()) {
        if (ends_with(path, "/" + cand)) hits.push_back(path);
      }
    }
    if (hits.size() == 1) return hits.front();
    return std::nullopt;
  }

  const std::vector<std::pair<std::string, const ParsedUnit*>>& units_paths() const;

  std::optional<std::string> resolve_js_module(const std::string& from, const std::string& spec) const {
    if (spec.empty() || spec[0] != '.') return std::nullopt;
    std::string base = normalize_path(dirname(from) + "/" + spec);
    static const char* exts[] = {"", ".ts", ".tsx", ".js", ".jsx", ".mjs", ".cjs", ".mts", ".cts"};
    for (const char* ext : exts)
      if (index_.has_file(base + ext)) return base + ext;
    for (const char* ext : exts) {
      if (!*ext) continue;
      if (index_.has_file(base + "/index" + ext)) return base + "/index" + ext;
    }
    // "./x.js" written in TS sources that compile to JS
    for (const char* js_ext : {".js", ".jsx", ".mjs"}) {
      if (ends_with(base, js_ext)) {
        auto stem = base.substr(0, base.size() - std::string_view(js_ext).size());
        for (const char* ext : {".ts", ".tsx", ".mts"})
          if (index_.has_file(stem + ext)) return stem + ext;
      }
    }
    return std::nullopt;
  }

 public:
  void set_paths(const std::vector<std::pair<std::string, const ParsedUnit*>>* p) { paths_ = p; }

 private:
  const ParsedUnit& unit_;
  const ComponentIndex& index_;
  mutable int depth_ = 0;
  const std::vector<std::pair<std::string, const ParsedUnit*>>* paths_ = nullptr;
};

const std::vector<std::pair<std::string, const ParsedUnit*>>& Resolver::units_paths() const {
  static const std::vector<std::pair<std::string, const ParsedUnit*>> empty;
  return paths_ ? *paths_ : empty;
}

}  // namespace

RelationResult extract_relations(const ParsedUnit& unit, const ComponentIndex& index) {
  Resolver r(unit, index);
  return r.run();
}

namespace {

RelationResult extract_relations_with_paths(const ParsedUnit& unit, const ComponentIndex& index,
                                            const std::vector<std::pair<std::string, const ParsedUnit*>>& paths) {
  Resolver r(unit, index);
  r.set_paths(&paths);
  return r.run();
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

AnalysisResult analyze_units(const std::vector<SourceUnit>& units, const Tokenizer& tokenizer, unsigned threads) {
  std::vector<std::optional<ParsedUnit>> slots(units.size());
  std::vector<std::optional<Diagnostic>> diags(units.size());
  parallel_for(units.size(), threads, [&](std::size_t i) {
    try {
      slots[i] = parse_unit(units[i], tokenizer);
    } catch (const ParseError& e) {
      diags[i] = Diagnostic{units[i].path, e.what()};
    }
  });
  AnalysisResult result;
  std::vector<ParsedUnit> parsed;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (slots[i]) parsed.push_back(std::move(*slots[i]));
    if (diags[i]) result.diagnostics.push_back(*diags[i]);
  }
  ComponentIndex index(parsed);
  std::vector<std::pair<std::string, const ParsedUnit*>> paths;
  for (const auto& u : parsed) paths.emplace_back(u.path, &u);

  std::vector<RelationResult> rels(parsed.size());
  parallel_for(parsed.size(), threads,
               [&](std::size_t i) { rels[i] = extract_relations_with_paths(parsed[i], index, paths); });

  std::vector<CodeComponent> comps;
  std::vector<DependencyEdge> edges;
  std::vector<ReferenceMiss> misses;
  for (auto& u : parsed)
    for (auto& pc : u.components) comps.push_back(pc.component);
  for (auto& r : rels) {
    edges.insert(edges.end(), r.edges.begin(), r.edges.end());
    misses.insert(misses.end(), r.misses.begin(), r.misses.end());
  }
  result.graph = build_graph(std::move(comps), std::move(edges), std::move(misses));
  return result;
}

}  // namespace codewiki::graph
