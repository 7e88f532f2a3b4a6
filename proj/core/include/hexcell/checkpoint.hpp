#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexcell/learner.hpp"

namespace hexcell {

inline constexpr uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AgentBlob {
  NetParams policy;
  NetParams value;
  AdamState policy_adam;
  AdamState value_adam;
};

struct Checkpoint {
  std::string config_hash;
  int64_t episodes = 0;  // completed training episodes
  std::vector<AgentBlob> agents;
};

AgentBlob Snapshot(const Agent& agent);
Agent Restore(const AgentBlob& blob, const PpoConfig& config);

// Little-endian binary layout: magic "HXCK", version, config hash, episode
// count, then per agent the policy and value parameters with their shapes and
// optimiser moments.
std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint DeserializeCheckpoint(const std::string& bytes);

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Throws CheckpointError if the agent count or any network shape differs from
// what the configuration implies.
void CheckCompatible(const Checkpoint& ckpt, int num_agents,
                     const NetShape& policy_shape, const NetShape& value_shape);

}  // namespace hexcell
