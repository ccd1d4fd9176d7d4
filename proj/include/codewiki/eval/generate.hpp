// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "codewiki/agent/backends.hpp"
#include "codewiki/eval/doc_structure.hpp"
#include "codewiki/eval/rubric.hpp"

namespace codewiki::eval {

struct RubricGenerationOptions {
  std::optional<agent::ModelConfig> synthesizer;  // default: first generator
  std::size_t max_turns = 24;
};

struct RubricGeneration {
  RubricNode rubric;
  std::vector<RubricNode> candidates;    // per generator that passed validation
  std::vector<std::string> diagnostics;  // dropped generators, merge fallbacks
};

/// One rubric per generator (role "rubric_generator/<name>", module "docs"),
/// one repair re-prompt on schema failure, then synthesis (role
/// "rubric_synthesizer") when more than one survives. Throws
/// RemoteModelError with the diagnostics when every generator fails.
RubricGeneration generate_rubric(const DocStructure& docs, const std::vector<agent::ModelConfig>& generators,
                                 agent::BackendProvider& backends, const RubricGenerationOptions& options = {});

/// Deterministic union of rubrics by case-insensitive name, weights averaged.
RubricNode merge_rubrics(const std::vector<RubricNode>& rubrics);

}  // namespace codewiki::eval
