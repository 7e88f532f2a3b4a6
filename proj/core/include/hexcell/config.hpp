#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hexcell/env.hpp"
#include "hexcell/learner.hpp"
#include "hexcell/metrics.hpp"

namespace hexcell {

struct TrainingConfig {
  int checkpoint_every = 50;  // episodes; 0 disables periodic checkpoints
};

// Everything a run needs. The on-disk form is JSON with one object per
// section; absent keys keep their defaults and unknown keys are rejected.
struct RunConfig {
  EnvConfig env;
  PpoConfig ppo;
  MetricsConfig metrics;
  TrainingConfig training;
};

// Throws ConfigError.
void ValidateRunConfig(const RunConfig& config);

RunConfig ParseConfig(const std::string& json_text);
RunConfig LoadConfig(const std::filesystem::path& path);
// Canonical, fully resolved JSON text (stable key order).
std::string DumpConfig(const RunConfig& config);

// git-style blob hash (SHA-1 of "blob <len>\0" + text), lowercase hex.
std::string GitBlobHash(const std::string& text);
// Hash of the canonical config text.
std::string ConfigHash(const RunConfig& config);

}  // namespace hexcell
