// SPDX-License-Identifier: Apache-2.0
#include "codewiki/eval/doc_structure.hpp"

#include <algorithm>

#include "codewiki/core/error.hpp"
#include "codewiki/core/text.hpp"

namespace codewiki::eval {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool is_markdown(const fs::path& p) {
  auto ext = to_lower(p.extension().string());
  return ext == ".md" || ext == ".markdown" || ext == ".mdx";
}

struct Heading {
  int level;
  std::string title;
  std::size_t begin;  // offset of the heading line
};

std::vector<Heading> scan_headings(const std::string& md) {
  std::vector<Heading> out;
  bool fence = false;
  std::string marker;
  std::size_t pos = 0;
  while (pos < md.size()) {
    std::size_t nl = md.find('\n', pos);
    if (nl == std::string::npos) nl = md.size();
    std::string t = trim(std::string_view(md).substr(pos, nl - pos));
    if (!fence && (starts_with(t, "```") || starts_with(t, "~~~"))) {
      fence = true;
      marker = t.substr(0, 3);
    } else if (fence) {
      if (starts_with(t, marker)) fence = false;
    } else {
      std::size_t n = 0;
      while (n < t.size() && t[n] == '#') ++n;
      if (n >= 1 && n <= 6 && (n == t.size() || t[n] == ' ')) {
        std::string title = trim(std::string_view(t).substr(n));
        while (!title.empty() && title.back() == '#') title.pop_back();
        out.push_back({static_cast<int>(n), trim(title), pos});
      }
    }
    pos = nl + 1;
  }
  return out;
}

class Builder {
 public:
  explicit Builder(std::map<std::string, std::string>& text) : text_(text) {}

  std::string next_id() { return "d" + std::to_string(counter_++); }

  std::vector<DocNode> directory(const fs::path& dir, const fs::path& base) {
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string name = e.path().filename().string();
      if (starts_with(name, ".")) continue;
      if (e.is_directory() || (e.is_regular_file() && is_markdown(e.path()))) entries.push_back(e.path());
    }
    std::sort(entries.begin(), entries.end());
    std::vector<DocNode> out;
    for (const auto& p : entries) {
      std::string rel = generic_relative(p, base);
      if (fs::is_directory(p)) {
        DocNode d;
        d.id = next_id();
        d.title = p.filename().string();
        d.kind = DocNodeKind::Directory;
        d.path = rel;
        d.children = directory(p, base);
        if (d.children.empty()) {
          --counter_;
          continue;
        }
        std::string all;
        for (const auto& c : d.children) all += text_[c.id] + "\n";
        text_[d.id] = all;
        out.push_back(std::move(d));
      } else {
        out.push_back(file(p, rel));
      }
    }
    return out;
  }

  DocNode file(const fs::path& p, const std::string& rel) {
    const std::string md = read_file(p);
    auto hs = scan_headings(md);
    int top = 7;
    for (const auto& h : hs) top = std::min(top, h.level);
    std::size_t top_count = 0;
    for (const auto& h : hs) top_count += h.level == top;

    DocNode f;
    f.id = next_id();
    f.path = rel;
    f.kind = DocNodeKind::File;
    text_[f.id] = md;
    std::size_t i = 0;
    if (top_count == 1 && !hs.empty() && hs.front().level == top) {
      f.title = hs.front().title;
      i = 1;
      f.children = sections(md, hs, i, top);
    } else {
      f.title = p.stem().string();
      f.children = sections(md, hs, i, 0);
    }
    return f;
  }

  // Headings deeper than `parent_level`, starting at hs[i].
  std::vector<DocNode> sections(const std::string& md, const std::vector<Heading>& hs, std::size_t& i,
                                int parent_level) {
    std::vector<DocNode> out;
    while (i < hs.size() && hs[i].level > parent_level) {
      const Heading& h = hs[i];
      DocNode s;
      s.id = next_id();
      s.title = h.title;
      s.kind = DocNodeKind::Section;
      ++i;
      s.children = sections(md, hs, i, h.level);
      std::size_t end = i < hs.size() ? hs[i].begin : md.size();
      text_[s.id] = md.substr(h.begin, end - h.begin);
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::map<std::string, std::string>& text_;
  std::size_t counter_ = 0;
};

json node_json(const DocNode& n) {
  static const char* kinds[] = {"directory", "file", "section"};
  json j{{"id", n.id}, {"title", n.title}, {"kind", kinds[static_cast<int>(n.kind)]}};
  if (!n.path.empty()) j["path"] = n.path;
  j["children"] = json::array();
  for (const auto& c : n.children) j["children"].push_back(node_json(c));
  return j;
}

}  // namespace

DocStructure parse_official_docs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("documentation directory not found: " + dir.string());
  DocStructure s;
  Builder b(s.text_);
  s.roots = b.directory(dir, dir);
  return s;
}

std::optional<std::string> DocStructure::fetch(const std::string& id) const {
  auto it = text_.find(id);
  if (it == text_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> DocStructure::search(const std::string& query, std::size_t limit) const {
  std::vector<std::string> words;
  for (const auto& w : split(to_lower(query), ' '))
    if (!trim(w).empty()) words.push_back(trim(w));
  std::vector<std::string> out;
  if (words.empty()) return out;
  std::vector<std::pair<std::size_t, std::string>> hits;  // (text size, id): most specific first
  for (const auto& [id, text] : text_) {
    std::string lower = to_lower(text);
    bool all = std::all_of(words.begin(), words.end(), [&](const std::string& w) { return lower.find(w) != std::string::npos; });
    if (all) hits.emplace_back(text.size(), id);
  }
  std::sort(hits.begin(), hits.end());
  for (const auto& [n, id] : hits) {
    if (out.size() >= limit) break;
    out.push_back(id);
  }
  return out;
}

json DocStructure::to_json() const {
  json nodes = json::array();
  for (const auto& r : roots) nodes.push_back(node_json(r));
  return json{{"schema_version", 1}, {"nodes", std::move(nodes)}};
}

}  // namespace codewiki::eval
