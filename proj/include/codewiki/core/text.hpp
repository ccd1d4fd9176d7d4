// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace codewiki {

// FNV-1a, 64 bit. Stable across platforms and runs.
constexpr std::uint64_t fnv1a64(std::string_view text,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
void replace_all(std::string& s, std::string_view from, std::string_view to);

/// Path-safe slug: ASCII alnum, '_' and '-' kept, bytes >= 0x80 kept (UTF-8),
/// everything else collapsed to single '-'. Never empty.
std::string slugify(std::string_view s, bool lowercase = false);

/// GitHub-style heading anchor.
std::string heading_anchor(std::string_view heading);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);

/// Repository-relative path with forward slashes.
std::string generic_relative(const std::filesystem::path& p, const std::filesystem::path& base);

}  // namespace codewiki
