// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codewiki/graph/types.hpp"

namespace codewiki::graph {

/// gitignore-style pattern set.
///
/// Supported syntax: `#` comments, `!` negation (last match wins), trailing
/// `/` for directory-only patterns, leading `/` or an inner `/` to anchor at
/// the root, `*`, `?`, `[...]` and `**` across directories.
class IgnoreMatcher {
 public:
  IgnoreMatcher() = default;
  explicit IgnoreMatcher(const std::vector<std::string>& patterns);

  void add(std::string_view pattern);
  bool ignored(std::string_view rel_path, bool is_dir) const;

  /// Vendored dependencies and build output directories.
  static std::vector<std::string> default_patterns();

 private:
  struct Rule {
    std::string glob;
    bool negate = false;
    bool dir_only = false;
    bool anchored = false;
  };
  std::vector<Rule> rules_;
};

/// Glob match of one pattern against a '/'-separated path.
bool glob_match(std::string_view pattern, std::string_view path);

struct ScanOptions {
  std::optional<std::set<Language>> include;
  std::vector<std::string> ignore = IgnoreMatcher::default_patterns();
  bool skip_hidden = true;
};

struct ScanWarning {
  std::string path;
  std::string message;
};

struct ScanResult {
  std::vector<SourceUnit> units;  // sorted by path
  std::vector<ScanWarning> warnings;
};

/// Throws IoError when root is missing or unreadable.
ScanResult scan_repository(const std::filesystem::path& root, const ScanOptions& options = {});

}  // namespace codewiki::graph
