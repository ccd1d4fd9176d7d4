// SPDX-License-Identifier: Apache-2.0
#include "codewiki/doc/links.hpp"

#include <filesystem>
#include <map>
#include <regex>

#include "codewiki/core/text.hpp"

namespace codewiki::doc {
namespace {

struct Line {
  std::size_t offset;
  std::string_view text;
  bool in_fence;  // fence delimiters count as inside
};

std::vector<Line> lines_of(const std::string& md) {
  std::vector<Line> out;
  bool fence = false;
  std::string marker;
  std::size_t pos = 0;
  while (pos <= md.size()) {
    std::size_t nl = md.find('\n', pos);
    if (nl == std::string::npos) nl = md.size();
    std::string_view line(md.data() + pos, nl - pos);
    std::string t = trim(line);
    bool delim = false;
    if (!fence && (starts_with(t, "```") || starts_with(t, "~~~"))) {
      fence = true;
      marker = t.substr(0, 3);
      delim = true;
    } else if (fence && starts_with(t, marker)) {
      out.push_back({pos, line, true});
      fence = false;
      pos = nl + 1;
      continue;
    }
    out.push_back({pos, line, fence || delim});
    pos = nl + 1;
  }
  return out;
}

}  // namespace

bool is_external_link(const std::string& target) {
  static const std::regex scheme("^[A-Za-z][A-Za-z0-9+.-]*:");
  return std::regex_search(target, scheme) || starts_with(target, "//");
}

std::vector<MarkdownLink> extract_links(const std::string& md) {
  std::vector<MarkdownLink> out;
  for (const auto& l : lines_of(md)) {
    if (l.in_fence) continue;
    const std::string_view s = l.text;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '`') {
        std::size_t run = 1;
        while (i + run < s.size() && s[i + run] == '`') ++run;
        std::string ticks(run, '`');
        auto close = s.find(ticks, i + run);
        if (close == std::string_view::npos) break;
        i = close + run - 1;
        continue;
      }
      if (s[i] == '\\') {
        ++i;
        continue;
      }
      if (s[i] != '[' || (i > 0 && s[i - 1] == '!')) continue;
      int depth = 0;
      std::size_t j = i;
      for (; j < s.size(); ++j) {
        if (s[j] == '[') ++depth;
        else if (s[j] == ']' && --depth == 0) break;
      }
      if (j >= s.size() || j + 1 >= s.size() || s[j + 1] != '(') continue;
      auto close = s.find(')', j + 2);
      if (close == std::string_view::npos) continue;
      std::string target = trim(s.substr(j + 2, close - j - 2));
      if (auto sp = target.find(' '); sp != std::string::npos) target = target.substr(0, sp);
      if (target.size() >= 2 && target.front() == '<' && target.back() == '>') target = target.substr(1, target.size() - 2);
      out.push_back({std::string(s.substr(i + 1, j - i - 1)), target, l.offset + i, close + 1 - i});
      i = close;
    }
  }
  return out;
}

std::vector<std::pair<int, std::string>> headings(const std::string& md) {
  std::vector<std::pair<int, std::string>> out;
  for (const auto& l : lines_of(md)) {
    if (l.in_fence) continue;
    std::string_view s = l.text;
    std::size_t lead = 0;
    while (lead < s.size() && lead < 3 && s[lead] == ' ') ++lead;
    std::size_t n = 0;
    while (lead + n < s.size() && s[lead + n] == '#') ++n;
    if (n == 0 || n > 6) continue;
    if (lead + n < s.size() && s[lead + n] != ' ' && s[lead + n] != '\t') continue;
    std::string text = trim(s.substr(lead + n));
    while (!text.empty() && text.back() == '#') text.pop_back();
    out.emplace_back(static_cast<int>(n), trim(text));
  }
  return out;
}

std::vector<std::string> explicit_anchors(const std::string& md) {
  static const std::regex re(R"re(<a\s+(?:id|name)\s*=\s*"([^"]+)")re");
  std::vector<std::string> out;
  for (const auto& l : lines_of(md)) {
    if (l.in_fence) continue;
    std::string s(l.text);
    for (std::sregex_iterator it(s.begin(), s.end(), re), end; it != end; ++it) out.push_back((*it)[1].str());
  }
  return out;
}

std::set<std::string> document_anchors(const std::string& md) {
  std::set<std::string> out;
  std::map<std::string, int> seen;
  for (const auto& [level, text] : headings(md)) {
    std::string a = heading_anchor(text);
    int k = seen[a]++;
    out.insert(k == 0 ? a : a + "-" + std::to_string(k));
  }
  for (auto& a : explicit_anchors(md)) out.insert(a);
  return out;
}

std::vector<std::string> fence_languages(const std::string& md) {
  std::vector<std::string> out;
  bool fence = false;
  std::string marker;
  for (const auto& part : split(md, '\n')) {
    std::string t = trim(part);
    if (!fence && (starts_with(t, "```") || starts_with(t, "~~~"))) {
      fence = true;
      marker = t.substr(0, 3);
      std::string info = trim(std::string_view(t).substr(3));
      if (auto sp = info.find_first_of(" \t{"); sp != std::string::npos) info = info.substr(0, sp);
      out.push_back(to_lower(info));
    } else if (fence && starts_with(t, marker)) {
      fence = false;
    }
  }
  return out;
}

std::vector<BrokenLink> check_links(const std::map<std::string, std::string>& docs) {
  namespace fs = std::filesystem;
  std::map<std::string, std::set<std::string>> anchors;
  for (const auto& [path, md] : docs) anchors[path] = document_anchors(md);
  std::vector<BrokenLink> out;
  for (const auto& [path, md] : docs) {
    for (const auto& link : extract_links(md)) {
      if (link.target.empty()) {
        out.push_back({path, link.target, "empty target"});
        continue;
      }
      if (is_external_link(link.target)) continue;
      std::string file = link.target;
      std::string anchor;
      if (auto h = file.find('#'); h != std::string::npos) {
        anchor = file.substr(h + 1);
        file = file.substr(0, h);
      }
      std::string resolved = path;
      if (!file.empty()) {
        fs::path p = (fs::path(path).parent_path() / file).lexically_normal();
        resolved = p.generic_string();
        if (resolved.empty() || starts_with(resolved, "..") || p.is_absolute()) {
          out.push_back({path, link.target, "outside the workspace"});
          continue;
        }
      }
      auto it = anchors.find(resolved);
      if (it == anchors.end()) {
        out.push_back({path, link.target, "no such document"});
      } else if (!anchor.empty() && !it->second.count(anchor)) {
        out.push_back({path, link.target, "no such anchor"});
      }
    }
  }
  return out;
}

std::string unlink(const std::string& md, const std::set<std::string>& targets) {
  auto links = extract_links(md);
  std::string out = md;
  for (auto it = links.rbegin(); it != links.rend(); ++it)
    if (targets.count(it->target)) out.replace(it->offset, it->length, it->text);
  return out;
}

}  // namespace codewiki::doc
