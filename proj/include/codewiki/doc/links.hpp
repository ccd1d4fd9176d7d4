// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "codewiki/doc/workspace.hpp"

namespace codewiki::doc {

struct MarkdownLink {
  std::string text;
  std::string target;  // as written
  std::size_t offset = 0;  // of '[' in the source
  std::size_t length = 0;  // whole "[text](target)"
};

/// Inline links outside code fences and code spans; images excluded.
std::vector<MarkdownLink> extract_links(const std::string& markdown);

/// Heading anchors (GitHub style, "-1" suffixes for repeats) plus explicit
/// <a id="..."> / <a name="..."> anchors.
std::set<std::string> document_anchors(const std::string& markdown);

/// Explicit <a id="..."> anchors only.
std::vector<std::string> explicit_anchors(const std::string& markdown);

/// Headings outside code fences: (level, text).
std::vector<std::pair<int, std::string>> headings(const std::string& markdown);

/// Info strings of fenced code blocks.
std::vector<std::string> fence_languages(const std::string& markdown);

bool is_external_link(const std::string& target);

struct BrokenLink {
  std::string document;  // workspace-relative
  std::string target;
  std::string reason;
};

/// Every intra-workspace link in `docs` (path -> markdown) must name an
/// existing document and, when given, an anchor inside it.
std::vector<BrokenLink> check_links(const std::map<std::string, std::string>& docs);

/// Replaces each listed broken link in `markdown` by its text.
std::string unlink(const std::string& markdown, const std::set<std::string>& targets);

}  // namespace codewiki::doc
