// SPDX-License-Identifier: Apache-2.0
#include "codewiki/graph/scanner.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <system_error>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace fs = std::filesystem;

namespace codewiki::graph {

namespace {

bool match_class(std::string_view pat, std::size_t& pi, char c) {
  // pat[pi] == '['
  std::size_t i = pi + 1;
  bool negate = false;
  if (i < pat.size() && (pat[i] == '!' || pat[i] == '^')) negate = true, ++i;
  bool matched = false;
  bool first = true;
  while (i < pat.size() && (first || pat[i] != ']')) {
    first = false;
    char lo = pat[i];
    char hi = lo;
    if (i + 2 < pat.size() && pat[i + 1] == '-' && pat[i + 2] != ']') {
      hi = pat[i + 2];
      i += 2;
    }
    if (c >= lo && c <= hi) matched = true;
    ++i;
  }
  if (i >= pat.size()) return false;  // unterminated: treat as no match
  pi = i + 1;
  return matched != negate;
}

bool match_here(std::string_view p, std::size_t pi, std::string_view s, std::size_t si) {
  while (pi < p.size()) {
    char pc = p[pi];
    if (pc == '*') {
      bool dbl = pi + 1 < p.size() && p[pi + 1] == '*';
      if (dbl) {
        std::size_t next = pi + 2;
        // "**/" matches zero or more directories
        if (next < p.size() && p[next] == '/') {
          if (match_here(p, next + 1, s, si)) return true;
          for (std::size_t k = si; k < s.size(); ++k)
            if (s[k] == '/' && match_here(p, next + 1, s, k + 1)) return true;
          return false;
        }
        for (std::size_t k = si; k <= s.size(); ++k)
          if (match_here(p, next, s, k)) return true;
        return false;
      }
      for (std::size_t k = si; k <= s.size(); ++k) {
        if (match_here(p, pi + 1, s, k)) return true;
        if (k < s.size() && s[k] == '/') break;
      }
      return false;
    }
    if (si >= s.size()) return false;
    if (pc == '?') {
      if (s[si] == '/') return false;
      ++pi, ++si;
      continue;
    }
    if (pc == '[') {
      std::size_t save = pi;
      if (!match_class(p, pi, s[si])) {
        if (pi == save) return false;
        return false;
      }
      ++si;
      continue;
    }
    if (pc == '\\' && pi + 1 < p.size()) ++pi, pc = p[pi];
    if (pc != s[si]) return false;
    ++pi, ++si;
  }
  return si == s.size();
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view path) { return match_here(pattern, 0, path, 0); }

IgnoreMatcher::IgnoreMatcher(const std::vector<std::string>& patterns) {
  for (const auto& p : patterns) add(p);
}

void IgnoreMatcher::add(std::string_view raw) {
  std::string p = trim(raw);
  if (p.empty() || p[0] == '#') return;
  Rule r;
  if (p[0] == '!') {
    r.negate = true;
    p.erase(0, 1);
  }
  if (!p.empty() && p.back() == '/') {
    r.dir_only = true;
    p.pop_back();
  }
  if (!p.empty() && p[0] == '/') {
    r.anchored = true;
    p.erase(0, 1);
  }
  if (p.find('/') != std::string::npos) r.anchored = true;
  if (p.empty()) return;
  r.glob = std::move(p);
  rules_.push_back(std::move(r));
}

bool IgnoreMatcher::ignored(std::string_view rel_path, bool is_dir) const {
  bool result = false;
  std::string_view base = rel_path;
  if (auto slash = rel_path.rfind('/'); slash != std::string_view::npos) base = rel_path.substr(slash + 1);
  for (const auto& r : rules_) {
    if (r.dir_only && !is_dir) continue;
    bool hit = r.anchored ? glob_match(r.glob, rel_path) : glob_match(r.glob, base);
    if (hit) result = !r.negate;
  }
  return result;
}

std::vector<std::string> IgnoreMatcher::default_patterns() {
  return {"node_modules/", "vendor/",  "third_party/", "build/",       "dist/",  "out/",
          "target/",       "bin/",     "obj/",         "__pycache__/", "venv/",  "*.min.js",
          "*.bundle.js",   "*.pb.h",   "*.pb.cc"};
}

ScanResult scan_repository(const fs::path& root, const ScanOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("repository root is not a readable directory: " + root.string());
  ScanResult result;
  IgnoreMatcher matcher(options.ignore);

  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw IoError("cannot read repository root " + root.string() + ": " + ec.message());
  for (auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
    if (ec) {
      result.warnings.push_back({"", ec.message()});
      ec.clear();
      continue;
    }
    const auto& entry = *it;
    auto rel = generic_relative(entry.path(), root);
    auto name = entry.path().filename().string();
    bool is_dir = entry.is_directory(ec);
    if (options.skip_hidden && !name.empty() && name[0] == '.') {
      if (is_dir) it.disable_recursion_pending();
      continue;
    }
    if (matcher.ignored(rel, is_dir)) {
      if (is_dir) it.disable_recursion_pending();
      continue;
    }
    if (is_dir || !entry.is_regular_file(ec)) continue;
    auto lang = language_from_path(rel);
    if (!lang) continue;
    if (options.include && !options.include->count(*lang)) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) {
      result.warnings.push_back({rel, "unreadable file skipped"});
      continue;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    result.units.push_back({rel, *lang, ss.str()});
  }
  std::sort(result.units.begin(), result.units.end(),
            [](const SourceUnit& a, const SourceUnit& b) { return a.path < b.path; });
  return result;
}

}  // namespace codewiki::graph
