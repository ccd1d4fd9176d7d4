// SPDX-License-Identifier: Apache-2.0
#include <string>
#include <unordered_set>
#include <vector>

#include "codewiki/core/text.hpp"
#include "parse_internal.hpp"

namespace codewiki::graph::detail {
namespace {

enum class Ctx { File, Namespace, Class, Body };

bool is_open(const Token& t) { return t.kind == TokenKind::Punct && (t.is("(") || t.is("[") || t.is("{")); }

class BraceParser {
 public:
  explicit BraceParser(ParseState& st)
      : st_(st),
        lang_(st.unit.language),
        js_(lang_ == Language::JavaScript || lang_ == Language::TypeScript),
        cpp_(lang_ == Language::C || lang_ == Language::Cpp) {}

  void run() { scope(0, st_.tokens.size(), Ctx::File, {}, std::nullopt, false); }

 private:
  using Scope = std::vector<std::string>;

  const Token& tok(std::size_t i) const { return st_.tok(i); }
  bool at(std::size_t i, std::string_view s) const { return st_.at(i, s); }
  std::size_t after_group(std::size_t i) const {
    return st_.partner[i] != npos && st_.partner[i] > i ? st_.partner[i] + 1 : i + 1;
  }
  bool name_token(std::size_t i) const { return i < st_.tokens.size() && tok(i).ident() && !is_keyword(lang_, tok(i).text); }

  // -- statement skipping -----------------------------------------------------

  bool ends_expression(const Token& t) const {
    if (t.kind == TokenKind::Number || t.kind == TokenKind::String) return true;
    if (t.ident()) {
      static const std::unordered_set<std::string_view> value_kw = {"this", "super", "true", "false", "null",
                                                                    "undefined"};
      return !is_keyword(lang_, t.text) || value_kw.count(t.text);
    }
    return t.is(")") || t.is("]") || t.is("}") || t.is("++") || t.is("--");
  }

  static bool continues(const Token& t) {
    static const std::unordered_set<std::string_view> ops = {
        ".", "?.", "?", ":", "=>", "=", "==", "===", "!=", "!==", "+", "-", "*", "/", "%", "&&", "||", "??",
        "&", "|", "^", "<", ">", "<=", ">=", ",", "+=", "-=", "*=", "/=", "&&=", "||=", "\?\?=", "**"};
    static const std::unordered_set<std::string_view> kws = {"else", "catch", "finally", "instanceof", "in",
                                                             "as", "satisfies", "extends", "implements"};
    if (t.kind == TokenKind::Punct) return ops.count(t.text) > 0;
    return t.ident() && kws.count(t.text) > 0;
  }

  /// End (exclusive) of the JS statement starting at i, using ASI at line breaks.
  std::size_t js_statement_end(std::size_t i, std::size_t e) const {
    std::size_t j = i;
    while (j < e) {
      const Token& t = tok(j);
      if (j > i && t.line_start && ends_expression(tok(j - 1)) && !continues(t)) return j;
      if (t.is(";")) return j + 1;
      j = is_open(t) ? after_group(j) : j + 1;
    }
    return e;
  }

  /// End of an arrow expression body: stops before ',' ';' or an ASI break.
  std::size_t js_expression_end(std::size_t i, std::size_t e) const {
    std::size_t j = i;
    while (j < e) {
      const Token& t = tok(j);
      if (j > i && t.line_start && ends_expression(tok(j - 1)) && !continues(t)) return j;
      if (t.is(";") || t.is(",")) return j;
      j = is_open(t) ? after_group(j) : j + 1;
    }
    return e;
  }

  std::size_t c_statement_end(std::size_t i, std::size_t e) const {
    std::size_t j = i;
    while (j < e) {
      const Token& t = tok(j);
      if (t.is(";")) return j + 1;
      if (t.is("{")) {
        std::size_t next = after_group(j);
        bool initializer = j > i && (at(j - 1, "=") || at(j - 1, ",") || at(j - 1, "return") || at(j - 1, "]") ||
                                     at(j - 1, ">") || tok(j - 1).ident());
        if (initializer && j > i && tok(j - 1).ident() && !(next < e && (at(next, ";") || at(next, ",")))) {
          return next;  // block after a name: property body or similar
        }
        if (initializer || (next < e && (at(next, "=") || at(next, ";")))) {
          j = next;
          continue;
        }
        return next;
      }
      j = is_open(t) ? after_group(j) : j + 1;
    }
    return e;
  }

  std::size_t statement_end(std::size_t i, std::size_t e) const {
    return js_ ? js_statement_end(i, e) : c_statement_end(i, e);
  }

  // -- prefixes ---------------------------------------------------------------

  /// Skips annotations, attributes and decorators at position i.
  std::size_t skip_annotations(std::size_t i, std::size_t e) const {
    for (;;) {
      if (i + 1 < e && at(i, "@") && !at(i + 1, "interface") && tok(i + 1).ident()) {
        i += 2;
        while (i + 1 < e && at(i, ".") && tok(i + 1).ident()) i += 2;
        if (i < e && at(i, "(")) i = after_group(i);
        continue;
      }
      if (!js_ && i < e && at(i, "[") && (lang_ == Language::CSharp || at(i + 1, "["))) {
        i = after_group(i);
        continue;
      }
      return i;
    }
  }

  bool is_modifier(std::size_t i) const {
    static const std::unordered_set<std::string_view> mods = {
        "public",   "private", "protected", "internal", "static",  "abstract", "final",     "sealed",
        "partial",  "virtual", "override",  "extern",   "inline",  "constexpr", "consteval", "constinit",
        "explicit", "unsafe",  "readonly",  "volatile", "async",   "strictfp", "transient", "native",
        "synchronized", "export", "default", "declare", "new",    "non-sealed", "file",    "required"};
    if (i >= st_.tokens.size() || !tok(i).ident() || !mods.count(tok(i).text)) return false;
    if (at(i, "new") && lang_ != Language::CSharp) return false;
    if (at(i, "default") && lang_ != Language::Java) return false;
    if (at(i, "extern") && i + 1 < st_.tokens.size() && tok(i + 1).kind == TokenKind::String) return false;
    return !(at(i + 1, "(") || at(i + 1, "=") || at(i + 1, ":") || at(i + 1, ";"));
  }

  std::size_t skip_template_params(std::size_t i, std::size_t e) const {
    // at "<"
    int depth = 0;
    while (i < e) {
      if (at(i, "<")) ++depth;
      else if (at(i, ">")) {
        if (--depth == 0) return i + 1;
      } else if (at(i, ";") || at(i, "{")) {
        return i;
      }
      i = is_open(tok(i)) ? after_group(i) : i + 1;
    }
    return i;
  }

  // -- scope walker -------------------------------------------------------------

  void scope(std::size_t b, std::size_t e, Ctx ctx, const Scope& sc, std::optional<std::size_t> parent,
             bool in_function) {
    std::size_t i = b;
    while (i < e) {
      std::size_t next = statement(i, e, ctx, sc, parent, in_function);
      i = next > i ? next : i + 1;
    }
  }

  std::size_t statement(std::size_t i, std::size_t e, Ctx ctx, const Scope& sc, std::optional<std::size_t> parent,
                        bool in_function) {
    if (at(i, ";")) return i + 1;
    if (at(i, "{")) return after_group(i);
    if (ctx == Ctx::Class && cpp_ && i + 1 < e && at(i + 1, ":") &&
        (at(i, "public") || at(i, "private") || at(i, "protected")))
      return i + 2;
    const std::size_t start = skip_annotations(i, e);
    if (start >= e) return e;
    if (start != i) return statement_body(start, e, ctx, sc, parent, in_function);
    return statement_body(i, e, ctx, sc, parent, in_function);
  }

  std::size_t statement_body(std::size_t i, std::size_t e, Ctx ctx, const Scope& sc,
                             std::optional<std::size_t> parent, bool in_function) {
    std::size_t r;
    if (js_ && (ctx == Ctx::File || ctx == Ctx::Namespace) && js_module_statement(i, e, r)) return r;
    if (namespace_decl(i, e, ctx, sc, parent, in_function, r)) return r;
    if (at(i, "typedef") && cpp_) return typedef_decl(i, e, sc, parent, in_function);
    if (type_decl(i, e, sc, parent, in_function, r)) return r;
    if (js_) {
      if (ctx == Ctx::Class) return js_member(i, e, sc, parent, in_function);
      if (js_function_decl(i, e, sc, parent, in_function, r)) return r;
      if (js_variable_decl(i, e, ctx, sc, parent, in_function, r)) return r;
      return js_statement_end(i, e);
    }
    if (ctx != Ctx::Body && c_function(i, e, ctx, sc, parent, in_function, r)) return r;
    return c_statement_end(i, e);
  }

  // -- namespaces ---------------------------------------------------------------

  bool namespace_decl(std::size_t i, std::size_t e, Ctx ctx, const Scope& sc, std::optional<std::size_t> parent,
                      bool in_function, std::size_t& next) {
    if (ctx == Ctx::Class || ctx == Ctx::Body) return false;
    std::size_t j = i;
    if (cpp_ && at(j, "extern") && j + 1 < e && tok(j + 1).kind == TokenKind::String) {
      if (at(j + 2, "{")) {
        scope(j + 3, st_.partner[j + 2], ctx, sc, parent, in_function);
        next = st_.partner[j + 2] + 1;
      } else {
        next = j + 2;
      }
      return true;
    }
    if (js_ && at(j, "declare")) ++j;
    if (cpp_ && at(j, "inline")) ++j;
    const bool kw = (lang_ == Language::Cpp || lang_ == Language::CSharp) ? at(j, "namespace")
                    : lang_ == Language::TypeScript ? (at(j, "namespace") || at(j, "module"))
                                                    : false;
    if (!kw) return false;
    ++j;
    if (j < e && tok(j).kind == TokenKind::String) {  // declare module "x" { ... }
      next = statement_end(j, e);
      return true;
    }
    Scope inner = sc;
    while (j < e && (tok(j).ident() || at(j, ".") || at(j, "::"))) {
      if (tok(j).ident()) inner.emplace_back(tok(j).text);
      ++j;
    }
    if (at(j, "{")) {
      std::size_t close = st_.partner[j];
      scope(j + 1, close, Ctx::Namespace, inner, parent, in_function);
      next = close + 1;
      return true;
    }
    if (at(j, ";") && lang_ == Language::CSharp) {  // file-scoped namespace
      scope(j + 1, e, Ctx::Namespace, inner, parent, in_function);
      next = e;
      return true;
    }
    if (at(j, "=")) {  // namespace alias
      next = statement_end(j, e);
      return true;
    }
    return false;
  }

  // -- JS/TS module statements --------------------------------------------------

  std::string string_value(std::size_t i) const {
    auto t = tok(i).text;
    if (t.size() >= 2) return std::string(t.substr(1, t.size() - 2));
    return std::string(t);
  }

  bool js_module_statement(std::size_t i, std::size_t e, std::size_t& next) {
    if (at(i, "import") && !at(i + 1, "(") && !at(i + 1, ".")) {
      next = js_import(i, e);
      return true;
    }
    if (at(i, "module") && at(i + 1, ".") && at(i + 2, "exports") && at(i + 3, "=")) {
      if (name_token(i + 4) && !at(i + 5, ".") && !at(i + 5, "(")) st_.out.default_export = std::string(tok(i + 4).text);
      next = js_statement_end(i, e);
      return true;
    }
    if (!at(i, "export")) return false;
    std::size_t j = i + 1;
    if (at(j, "default")) {
      ++j;
      std::size_t k = j;
      if (at(k, "async")) ++k;
      if ((at(k, "function") || at(k, "class") || at(k, "abstract")) ) {
        std::size_t n = k + 1;
        if (at(k, "abstract")) ++n;
        if (at(n, "*")) ++n;
        if (name_token(n)) {
          st_.out.default_export = std::string(tok(n).text);
          next = j;  // continue with the declaration itself
          return true;
        }
        next = js_statement_end(j, e);
        return true;
      }
      if (name_token(j) && (at(j + 1, ";") || j + 1 >= e || tok(j + 1).line_start))
        st_.out.default_export = std::string(tok(j).text);
      next = js_statement_end(j, e);
      return true;
    }
    if (at(j, "{") || at(j, "*") || at(j, "=") || (at(j, "type") && at(j + 1, "{"))) {
      next = js_statement_end(j, e);
      return true;
    }
    next = j;  // export const / function / class / interface ...
    return true;
  }

  std::size_t js_import(std::size_t i, std::size_t e) {
    std::size_t end = js_statement_end(i, e);
    std::size_t j = i + 1;
    if (at(j, "type") && !at(j + 1, "from") && !at(j + 1, ",") && !at(j + 1, "=")) ++j;
    if (j < end && tok(j).kind == TokenKind::String) return end;
    std::vector<ImportBinding> bs;
    std::optional<std::string> spec;
    // import x = require("m")
    if (name_token(j) && at(j + 1, "=") && at(j + 2, "require") && at(j + 3, "(") &&
        tok(j + 4).kind == TokenKind::String) {
      st_.out.imports.push_back({std::string(tok(j).text), string_value(j + 4), "", false});
      return end;
    }
    while (j < end) {
      if (at(j, "from") && j + 1 < end && tok(j + 1).kind == TokenKind::String) {
        spec = string_value(j + 1);
        break;
      }
      if (at(j, "*") && at(j + 1, "as") && name_token(j + 2)) {
        bs.push_back({std::string(tok(j + 2).text), "", "", false});
        j += 3;
        continue;
      }
      if (at(j, "{")) {
        std::size_t close = st_.partner[j];
        for (std::size_t k = j + 1; k < close; ++k) {
          if (at(k, "type") && tok(k + 1).ident() && !at(k + 1, "as")) continue;
          if (!tok(k).ident() && tok(k).kind != TokenKind::String) continue;
          std::string sym = tok(k).kind == TokenKind::String ? string_value(k) : std::string(tok(k).text);
          std::string alias = sym;
          if (at(k + 1, "as") && k + 2 < close) {
            alias = std::string(tok(k + 2).text);
            k += 2;
          }
          bs.push_back({alias, "", sym, false});
        }
        j = close + 1;
        continue;
      }
      if (tok(j).ident() && !at(j, "from")) {
        bs.push_back({std::string(tok(j).text), "", "", true});
      }
      ++j;
    }
    if (!spec) return end;
    for (auto& b : bs) {
      b.module = *spec;
      if (b.is_default) b.symbol.clear();
      st_.out.imports.push_back(std::move(b));
    }
    return end;
  }

  // -- types --------------------------------------------------------------------

  std::vector<RawReference> base_list(std::size_t j, std::size_t body) const {
    std::vector<RawReference> out;
    static const std::unordered_set<std::string_view> skip = {"public", "private", "protected", "virtual",
                                                              "extends", "implements", "final", "sealed"};
    while (j < body) {
      if (at(j, "where")) break;
      if (at(j, ",") || at(j, ":") || (tok(j).ident() && skip.count(tok(j).text))) {
        ++j;
        continue;
      }
      if (at(j, "<")) {
        j = skip_template_params(j, body);
        continue;
      }
      if (at(j, "(")) {
        j = after_group(j);
        continue;
      }
      if (tok(j).ident()) {
        std::vector<std::string> chain{std::string(tok(j).text)};
        ++j;
        while (j + 1 < body && (at(j, ".") || at(j, "::")) && tok(j + 1).ident()) {
          chain.emplace_back(tok(j + 1).text);
          j += 2;
        }
        RawReference r;
        r.kind = RawKind::Inheritance;
        r.name = chain.back();
        chain.pop_back();
        r.receiver = join(chain, ".");
        out.push_back(std::move(r));
        continue;
      }
      ++j;
    }
    return out;
  }

  bool type_decl(std::size_t i, std::size_t e, const Scope& sc, std::optional<std::size_t> parent, bool in_function,
                 std::size_t& next) {
    std::size_t j = i;
    for (;;) {
      if (is_modifier(j)) {
        ++j;
      } else if (lang_ == Language::Cpp && at(j, "template") && at(j + 1, "<")) {
        j = skip_template_params(j + 1, e);
      } else if (js_ && at(j, "abstract")) {
        ++j;
      } else {
        break;
      }
    }
    if (lang_ == Language::Java && at(j, "@") && at(j + 1, "interface")) ++j;
    if (j >= e || !tok(j).ident()) return false;
    const auto kw = tok(j).text;
    ComponentKind kind;
    bool is_enum = false;
    if (kw == "class") {
      kind = ComponentKind::Class;
    } else if (kw == "struct" && !js_ && lang_ != Language::Java) {
      kind = ComponentKind::Struct;
    } else if (kw == "union" && cpp_) {
      kind = ComponentKind::Struct;
    } else if (kw == "interface" && !cpp_) {
      kind = ComponentKind::Interface;
    } else if (kw == "enum") {
      is_enum = true;
      kind = ComponentKind::Class;
    } else if (kw == "record" && (lang_ == Language::Java || lang_ == Language::CSharp) && tok(j + 1).ident()) {
      kind = ComponentKind::Class;
      if (at(j + 1, "struct")) {
        kind = ComponentKind::Struct;
        ++j;
      } else if (at(j + 1, "class")) {
        ++j;
      }
    } else {
      return false;
    }
    std::size_t n = j + 1;
    if (is_enum && (at(n, "class") || at(n, "struct"))) ++n;
    while (cpp_ && n < e && (at(n, "alignas") || at(n, "__attribute__") || at(n, "__declspec") || at(n, "["))) {
      n = at(n, "[") ? after_group(n) : after_group(n + 1);
    }
    if (!name_token(n) && !(n < e && tok(n).ident() && js_)) {
      if (at(n, "{") && is_enum) {  // anonymous enum
        next = c_or_js_end(after_group(n), e);
        return true;
      }
      return false;
    }
    std::string name(tok(n).text);
    std::size_t k = n + 1;
    // C++ nested-name definitions: class Outer::Inner { ... }
    while (cpp_ && at(k, "::") && name_token(k + 1)) {
      name = std::string(tok(k + 1).text);
      k += 2;
    }
    const bool generic_ok = !cpp_ || lang_ == Language::Cpp;
    std::size_t after_name = k;
    if (generic_ok && at(k, "<")) k = skip_template_params(k, e);
    if (at(k, "final") || at(k, "sealed")) ++k;
    const bool header_ok = at(k, "{") || at(k, ":") || at(k, "extends") || at(k, "implements") || at(k, "where") ||
                           at(k, "(") || at(k, ";") || at(k, "permits");
    if (!header_ok) return false;
    if (at(k, ";")) {  // forward declaration
      next = k + 1;
      return true;
    }
    // Find the body brace.
    std::size_t body = k;
    while (body < e && !at(body, "{") && !at(body, ";")) {
      if (at(body, "<")) body = skip_template_params(body, e);
      else body = is_open(tok(body)) ? after_group(body) : body + 1;
    }
    if (is_enum && !(lang_ == Language::Java)) {
      next = body < e && at(body, "{") ? c_or_js_end(after_group(body), e) : body + 1;
      return true;
    }
    if (body >= e) return false;
    if (at(body, ";")) {  // record without body
      if (!at(k, "(")) {
        next = body + 1;
        return true;
      }
      auto idx = st_.add(name, kind, sc, parent, in_function, i, body, body, body);
      st_.drafts[idx].pc.bases = base_list(st_.partner[k] + 1, body);
      next = body + 1;
      return true;
    }
    std::size_t close = st_.partner[body];
    std::size_t bases_from = at(after_name, "<") ? k : after_name;
    if (at(bases_from, "(")) bases_from = after_group(bases_from);
    auto idx = st_.add(name, kind, sc, parent, in_function, i, close, body + 1, close);
    if (kind == ComponentKind::Interface && cpp_) st_.drafts[idx].pc.is_type = true;
    st_.drafts[idx].pc.bases = base_list(bases_from, body);
    Scope inner = sc;
    inner.push_back(name);
    scope(body + 1, close, Ctx::Class, inner, idx, in_function);
    next = c_or_js_end(close + 1, e);
    return true;
  }

  // After a type body: C/C++ declarators up to ';'; otherwise nothing.
  std::size_t c_or_js_end(std::size_t i, std::size_t e) const {
    if (at(i, ";")) return i + 1;
    if (cpp_) {
      std::size_t j = i;
      while (j < e && !at(j, ";") && !at(j, "{") && !tok(j).line_start) j = is_open(tok(j)) ? after_group(j) : j + 1;
      if (at(j, ";")) return j + 1;
      if (j > i && j < e && !at(j, "{")) return c_statement_end(i, e);
    }
    return i;
  }

  std::size_t typedef_decl(std::size_t i, std::size_t e, const Scope& sc, std::optional<std::size_t> parent,
                           bool in_function) {
    std::size_t j = i + 1;
    if (!(at(j, "struct") || at(j, "union"))) return c_statement_end(i, e);
    std::size_t k = j + 1;
    std::optional<std::string> tag;
    if (name_token(k)) tag = std::string(tok(k++).text);
    if (!at(k, "{")) return c_statement_end(i, e);
    std::size_t close = st_.partner[k];
    std::size_t n = close + 1;
    std::optional<std::string> alias;
    while (n < e && !at(n, ";")) {
      if (name_token(n) && !alias) alias = std::string(tok(n).text);
      n = is_open(tok(n)) ? after_group(n) : n + 1;
    }
    std::string name = tag ? *tag : alias ? *alias : std::string();
    std::size_t end = n < e ? n : e - 1;
    if (!name.empty()) {
      auto idx = st_.add(name, ComponentKind::Struct, sc, parent, in_function, i, end, k + 1, close);
      Scope inner = sc;
      inner.push_back(name);
      scope(k + 1, close, Ctx::Class, inner, idx, in_function);
    }
    return end + 1;
  }

  // -- C family functions -------------------------------------------------------

  bool c_function(std::size_t i, std::size_t e, Ctx ctx, const Scope& sc, std::optional<std::size_t> parent,
                  bool in_function, std::size_t& next) {
    if (at(i, "friend") || at(i, "using") || at(i, "typedef") || at(i, "return") || at(i, "delegate") ||
        at(i, "event") || at(i, "package") || at(i, "import") || at(i, "static_assert") || at(i, "template") ||
        (at(i, "using") && lang_ == Language::CSharp)) {
      if (!(at(i, "template") && lang_ == Language::Cpp)) return false;
    }
    std::size_t j = i;
    if (lang_ == Language::Cpp && at(j, "template") && at(j + 1, "<")) j = skip_template_params(j + 1, e);
    std::size_t cand = npos;
    std::string name;
    Scope quals;
    // header before the parameter list
    while (j < e) {
      if (at(j, ";") || at(j, "{") || at(j, "=") || at(j, "=>")) return false;
      if (at(j, "@") && j + 1 < e && tok(j + 1).ident()) {
        j = skip_annotations(j, e);
        continue;
      }
      if (at(j, "operator") && (cpp_ || lang_ == Language::CSharp)) {
        std::size_t k = j + 1;
        std::string op;
        if (at(k, "(") && at(k + 1, ")")) {
          op = "()";
          k += 2;
        } else {
          while (k < e && !at(k, "(")) {
            if (at(k, ";") || at(k, "{")) return false;
            if (at(k, "[")) {
              op += "[]";
              k = after_group(k);
              continue;
            }
            if (!op.empty() && tok(k).ident() && tok(k - 1).ident()) op += ' ';
            op += std::string(tok(k).text);
            ++k;
          }
        }
        if (!at(k, "(")) return false;
        cand = k;
        name = "operator" + op;
        collect_qualifiers(j, quals);
        break;
      }
      if (at(j, "(")) {
        if (j > i && name_token(j - 1)) {
          cand = j;
          name = std::string(tok(j - 1).text);
          std::size_t q = j - 1;
          if (q > i && at(q - 1, "~")) {
            name = "~" + name;
            --q;
          }
          collect_qualifiers(q, quals);
          break;
        }
        j = after_group(j);
        continue;
      }
      if (at(j, "<") && lang_ == Language::Cpp && j > i && at(j - 1, "template")) {
        j = skip_template_params(j, e);
        continue;
      }
      j = is_open(tok(j)) ? after_group(j) : j + 1;
    }
    if (cand == npos) return false;
    std::size_t q = st_.partner[cand];
    // trailing part up to the body
    enum class Mode { Plain, Init, Throws, Where } mode = Mode::Plain;
    std::size_t k = q + 1;
    while (k < e) {
      const Token& t = tok(k);
      if (t.is("{")) {
        if (mode == Mode::Init && tok(k - 1).ident()) {
          std::size_t after = after_group(k);
          if (after < e && (at(after, ",") || at(after, "{"))) {
            k = after;
            continue;
          }
        }
        break;
      }
      if (t.is("=>") && lang_ == Language::CSharp && mode != Mode::Init) {
        std::size_t end = k;
        while (end < e && !at(end, ";")) end = is_open(tok(end)) ? after_group(end) : end + 1;
        if (end >= e) return false;
        add_function(name, ctx, sc, quals, parent, in_function, i, end);
        next = end + 1;
        return true;
      }
      if (t.is(";") || t.is("=")) return false;
      if (t.is("(") || t.is("[")) {
        k = after_group(k);
        continue;
      }
      if (t.is(":")) {
        if (!(cpp_ || lang_ == Language::CSharp) && mode != Mode::Where) return false;
        if (mode != Mode::Where) mode = Mode::Init;
        ++k;
        continue;
      }
      if (t.is(",")) {
        if (mode == Mode::Plain) return false;
        ++k;
        continue;
      }
      if (t.ident()) {
        if (t.is("throws")) mode = Mode::Throws;
        else if (t.is("where")) mode = Mode::Where;
        else if (t.is("return") || t.is("if") || t.is("while") || t.is("for")) return false;
        ++k;
        continue;
      }
      static const std::unordered_set<std::string_view> ok = {"::", ".", "<", ">", "*", "&", "&&", "->", "?", "~"};
      if (t.kind == TokenKind::Punct && ok.count(t.text)) {
        ++k;
        continue;
      }
      if (t.kind == TokenKind::String && cpp_) {  // asm labels etc.
        ++k;
        continue;
      }
      return false;
    }
    if (k >= e) return false;
    std::size_t close = st_.partner[k];
    add_function(name, ctx, sc, quals, parent, in_function, i, close);
    next = close + 1;
    return true;
  }

  void collect_qualifiers(std::size_t name_at, Scope& quals) const {
    // name_at: index of the name (or "operator"/"~"); walk back over A::B::
    std::size_t q = name_at;
    while (q >= 2 && at(q - 1, "::")) {
      std::size_t p = q - 2;
      if (at(p, ">")) {  // Foo<T>::bar
        int depth = 0;
        while (p > 0) {
          if (at(p, ">")) ++depth;
          else if (at(p, "<") && --depth == 0) break;
          --p;
        }
        if (p == 0) break;
        --p;
      }
      if (!name_token(p)) break;
      quals.insert(quals.begin(), std::string(tok(p).text));
      q = p;
    }
  }

  void add_function(const std::string& name, Ctx ctx, const Scope& sc, const Scope& quals,
                    std::optional<std::size_t> parent, bool in_function, std::size_t first, std::size_t last) {
    Scope s = sc;
    s.insert(s.end(), quals.begin(), quals.end());
    ComponentKind kind = (ctx == Ctx::Class || !quals.empty()) ? ComponentKind::Method : ComponentKind::Function;
    st_.add(name, kind, std::move(s), parent, in_function, first, last, first, last + 1);
  }

  // -- JS / TS ------------------------------------------------------------------

  /// After a parameter list closing at q: index of the body '{', or npos.
  std::size_t js_body_after_params(std::size_t q, std::size_t e) const {
    std::size_t k = q + 1;
    if (at(k, "{")) return k;
    if (!at(k, ":")) return npos;
    while (k < e) {
      const Token& t = tok(k);
      if (t.is("{")) {
        const Token& prev = tok(k - 1);
        if (prev.is(":") || prev.is("|") || prev.is("&") || prev.is("<") || prev.is(",") || prev.is("=>")) {
          k = after_group(k);
          continue;
        }
        return k;
      }
      if (t.is(";") || t.is("=") || (k > q + 1 && t.line_start && !continues(t) && ends_expression(tok(k - 1)) &&
                                     !tok(k - 1).is(":")))
        return npos;
      k = is_open(t) ? after_group(k) : k + 1;
    }
    return npos;
  }

  bool js_function_decl(std::size_t i, std::size_t e, const Scope& sc, std::optional<std::size_t> parent,
                        bool in_function, std::size_t& next) {
    std::size_t j = i;
    while (at(j, "export") || at(j, "default") || at(j, "declare")) ++j;
    if (at(j, "async")) ++j;
    if (!at(j, "function")) return false;
    ++j;
    if (at(j, "*")) ++j;
    if (!name_token(j) && !(j < e && tok(j).ident())) return false;
    std::string name(tok(j).text);
    ++j;
    if (at(j, "<")) j = skip_template_params(j, e);
    if (!at(j, "(")) return false;
    std::size_t body = js_body_after_params(st_.partner[j], e);
    if (body == npos) {  // overload signature
      next = js_statement_end(j, e);
      return true;
    }
    std::size_t close = st_.partner[body];
    auto idx = st_.add(name, ComponentKind::Function, sc, parent, in_function, i, close, i, close + 1);
    Scope inner = sc;
    inner.push_back(name);
    scope(body + 1, close, Ctx::Body, inner, idx, true);
    next = close + 1;
    return true;
  }

  /// RHS at r is a function or arrow: returns body range [first,last] and whether it is a block.
  struct FnRhs {
    std::size_t body = npos;  // '{' of a block body
    std::size_t last = npos;  // last token of the definition
  };

  std::optional<FnRhs> js_function_rhs(std::size_t r, std::size_t e) const {
    if (at(r, "async") && !at(r + 1, "=>")) ++r;
    if (at(r, "function")) {
      std::size_t k = r + 1;
      if (at(k, "*")) ++k;
      if (k < e && tok(k).ident()) ++k;
      if (!at(k, "(")) return std::nullopt;
      std::size_t body = js_body_after_params(st_.partner[k], e);
      if (body == npos) return std::nullopt;
      return FnRhs{body, st_.partner[body]};
    }
    std::size_t arrow = npos;
    if (at(r, "<")) r = skip_template_params(r, e);
    if (at(r, "(")) {
      std::size_t k = st_.partner[r] + 1;
      if (at(k, "=>")) {
        arrow = k;
      } else if (at(k, ":")) {
        while (k < e && !at(k, "=>") && !at(k, ";") && !at(k, "=")) k = is_open(tok(k)) ? after_group(k) : k + 1;
        if (at(k, "=>")) arrow = k;
      }
    } else if (r < e && tok(r).ident() && at(r + 1, "=>")) {
      arrow = r + 1;
    }
    if (arrow == npos) return std::nullopt;
    std::size_t b = arrow + 1;
    if (at(b, "{")) return FnRhs{b, st_.partner[b]};
    std::size_t end = js_expression_end(b, e);
    if (end <= b) return std::nullopt;
    return FnRhs{npos, end - 1};
  }

  bool js_variable_decl(std::size_t i, std::size_t e, Ctx ctx, const Scope& sc, std::optional<std::size_t> parent,
                        bool in_function, std::size_t& next) {
    std::size_t j = i;
    while (at(j, "export") || at(j, "declare")) ++j;
    if (!(at(j, "const") || at(j, "let") || at(j, "var"))) return false;
    std::size_t end = js_statement_end(i, e);
    if (ctx != Ctx::Body) {
      auto bs = parse_js_require(st_, j, end);
      if (!bs.empty()) {
        for (auto& b : bs) st_.out.imports.push_back(std::move(b));
        next = end;
        return true;
      }
    }
    if (!name_token(j + 1)) return false;
    std::string name(tok(j + 1).text);
    std::size_t k = j + 2;
    if (at(k, ":")) {
      while (k < end && !at(k, "=")) k = is_open(tok(k)) ? after_group(k) : k + 1;
    }
    if (!at(k, "=")) return false;
    std::size_t r = k + 1;
    if (at(r, "class")) {
      std::size_t body = r + 1;
      while (body < e && !at(body, "{")) body = is_open(tok(body)) ? after_group(body) : body + 1;
      if (body >= e) return false;
      std::size_t close = st_.partner[body];
      auto idx = st_.add(name, ComponentKind::Class, sc, parent, in_function, i, close, body + 1, close);
      st_.drafts[idx].pc.bases = base_list(r + 1, body);
      Scope inner = sc;
      inner.push_back(name);
      scope(body + 1, close, Ctx::Class, inner, idx, in_function);
      next = js_statement_end(close, e);
      return true;
    }
    auto fn = js_function_rhs(r, e);
    if (!fn) return false;
    std::size_t last = fn->last;
    if (at(last + 1, ";")) ++last;
    auto idx = st_.add(name, ComponentKind::Function, sc, parent, in_function, i, last, i, last + 1);
    if (fn->body != npos) {
      Scope inner = sc;
      inner.push_back(name);
      scope(fn->body + 1, st_.partner[fn->body], Ctx::Body, inner, idx, true);
    }
    next = last + 1;
    return true;
  }

  std::size_t js_member(std::size_t i, std::size_t e, const Scope& sc, std::optional<std::size_t> parent,
                        bool in_function) {
    std::size_t j = skip_annotations(i, e);
    while (j < e && at(j, "@")) {  // JS decorators
      ++j;
      while (j < e && (tok(j).ident() || at(j, "."))) ++j;
      if (at(j, "(")) j = after_group(j);
    }
    static const std::unordered_set<std::string_view> mods = {"static",   "async",    "public", "private",
                                                              "protected", "readonly", "abstract", "override",
                                                              "declare",  "get",      "set",    "accessor"};
    while (j + 1 < e && tok(j).ident() && mods.count(tok(j).text) &&
           (tok(j + 1).ident() || at(j + 1, "*") || at(j + 1, "[") || tok(j + 1).kind == TokenKind::String))
      ++j;
    if (at(j, "*")) ++j;
    if (j >= e) return e;
    if (at(j, "static") && at(j + 1, "{")) return after_group(j + 1);
    if (!(tok(j).ident() || tok(j).kind == TokenKind::String || tok(j).kind == TokenKind::Number))
      return js_statement_end(j, e);
    std::string name(tok(j).text);
    if (tok(j).kind == TokenKind::String) name = string_value(j);
    std::size_t k = j + 1;
    if (at(k, "?") || at(k, "!")) ++k;
    if (at(k, "<")) k = skip_template_params(k, e);
    if (at(k, "(")) {
      std::size_t body = js_body_after_params(st_.partner[k], e);
      if (body == npos) return js_statement_end(k, e);
      std::size_t close = st_.partner[body];
      auto idx = st_.add(name, ComponentKind::Method, sc, parent, in_function, j, close, j, close + 1);
      Scope inner = sc;
      inner.push_back(name);
      scope(body + 1, close, Ctx::Body, inner, idx, true);
      return close + 1;
    }
    if (at(k, ":")) {
      while (k < e && !at(k, "=") && !at(k, ";") && !(tok(k).line_start && ends_expression(tok(k - 1))))
        k = is_open(tok(k)) ? after_group(k) : k + 1;
    }
    if (at(k, "=")) {
      auto fn = js_function_rhs(k + 1, e);
      if (fn) {
        std::size_t last = fn->last;
        if (at(last + 1, ";")) ++last;
        auto idx = st_.add(name, ComponentKind::Method, sc, parent, in_function, j, last, j, last + 1);
        if (fn->body != npos) {
          Scope inner = sc;
          inner.push_back(name);
          scope(fn->body + 1, st_.partner[fn->body], Ctx::Body, inner, idx, true);
        }
        return last + 1;
      }
    }
    return js_statement_end(j, e);
  }

  ParseState& st_;
  Language lang_;
  bool js_;
  bool cpp_;
};

}  // namespace

void parse_brace_family(ParseState& st) {
  BraceParser(st).run();
  if (st.unit.language == Language::Java) {
    // import a.b.C;  import static a.b.C.m;  import a.b.*;
    const auto& toks = st.tokens;
    int depth = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i].is("{")) ++depth;
      else if (toks[i].is("}")) --depth;
      if (depth != 0 || !toks[i].is("import")) continue;
      std::size_t j = i + 1;
      bool is_static = false;
      if (st.at(j, "static")) {
        is_static = true;
        ++j;
      }
      std::vector<std::string> parts;
      bool star = false;
      while (j < toks.size() && !toks[j].is(";")) {
        if (toks[j].ident()) parts.emplace_back(toks[j].text);
        if (toks[j].is("*")) star = true;
        ++j;
      }
      if (parts.empty()) continue;
      if (star) {
        st.out.imports.push_back({"*", join(parts, "."), "*", false});
      } else if (is_static && parts.size() >= 2) {
        auto sym = parts.back();
        parts.pop_back();
        st.out.imports.push_back({sym, join(parts, "."), sym, false});
      } else {
        st.out.imports.push_back({parts.back(), join(parts, "."), "", false});
      }
      i = j;
    }
  }
}

}  // namespace codewiki::graph::detail
