// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "codewiki/agent/agent_loop.hpp"
#include "codewiki/decompose/decompose.hpp"

namespace codewiki::decompose {

/// Asks a model (role "partitioner") to group components into feature
/// modules through a `propose_partition` tool. Invalid proposals are fed
/// back as tool errors; no valid proposal within max_turns throws
/// RemoteModelError, which decompose() answers with the greedy fallback.
class LlmPartitioner final : public Partitioner {
 public:
  LlmPartitioner(agent::ChatBackend& backend, agent::ModelConfig config, std::size_t max_turns = 4);
  std::vector<SubmoduleSpec> partition(const PartitionInput& input) override;

  static std::string prompt(const PartitionInput& input);

 private:
  agent::ChatBackend& backend_;
  agent::ModelConfig config_;
  std::size_t max_turns_;
};

}  // namespace codewiki::decompose
