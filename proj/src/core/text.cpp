// SPDX-License-Identifier: Apache-2.0
#include "codewiki/core/text.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "codewiki/core/error.hpp"

namespace codewiki {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string slugify(std::string_view s, bool lowercase) {
  std::string out;
  bool dash = false;
  for (unsigned char c : s) {
    bool keep = std::isalnum(c) || c == '_' || c >= 0x80;
    if (keep) {
      if (dash && !out.empty()) out += '-';
      dash = false;
      out += lowercase ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    } else {
      dash = true;
    }
  }
  if (out.empty()) out = "x";
  return out;
}

std::string heading_anchor(std::string_view heading) {
  std::string out;
  for (unsigned char c : trim(heading)) {
    if (std::isalnum(c) || c == '_' || c == '-' || c >= 0x80) {
      out += static_cast<char>(std::tolower(c));
    } else if (c == ' ') {
      out += '-';
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write " + p.string());
}

std::string generic_relative(const std::filesystem::path& p, const std::filesystem::path& base) {
  return std::filesystem::relative(p, base).generic_string();
}

}  // namespace codewiki
