#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "saricos/checkpoint.hpp"
#include "saricos/config.hpp"
#include "saricos/learner.hpp"
#include "saricos/metrics.hpp"
#include "saricos/policy.hpp"

namespace saricos {

inline constexpr int kManifestSchemaVersion = 1;

enum class Agent { saricos, er };
std::string to_string(Agent a);
Agent agent_from_string(const std::string& s);

struct ArtifactRecord {
  std::string path;    // relative to the manifest's directory
  std::string sha256;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;       // learner seed
  std::uint64_t eval_seed = 0;
  long episodes_run = 0;
  bool early_stopped = false;
  std::string checkpoint;
  std::string curve;
  std::string metrics;
  MetricsRecord eval;
  std::vector<std::string> warnings;
};

struct RunManifest {
  int schema_version = kManifestSchemaVersion;
  std::string mode;       // "saricos" or "er"
  std::string scenario;
  std::string config_path;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> trials;
  std::vector<ArtifactRecord> artifacts;
  std::string started;    // UTC, ISO 8601
  std::string finished;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

// Problems found when re-checking a manifest on disk: missing artifacts,
// digest mismatches, and a stored config whose hash differs from the record.
// Empty when everything matches.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

// Learner seed for each trial, derived from the run seed.
std::uint64_t trial_seed(std::uint64_t run_seed, std::uint64_t trial);
std::uint64_t evaluation_seed(std::uint64_t trial_seed);

std::shared_ptr<FeatureMap> make_run_feature_map(const RunConfig& cfg);
TwoTieredPolicy initial_policy(const RunConfig& cfg);

Checkpoint make_checkpoint(const RunConfig& cfg, Agent agent, const PolicyParams& params,
                           std::uint64_t trial, std::uint64_t seed);

// Rebuilds the policy for the environment described by cfg. Throws
// validation_error naming the expected and actual shapes when the
// checkpoint was trained with different feature dimensions.
TwoTieredPolicy policy_from_checkpoint(const Checkpoint& ckpt, const RunConfig& cfg);

// Trains cfg.trials independent agents and writes, under out:
//   config.ini, manifest.json, summary.txt, metrics.tsv
//   trial_<i>/checkpoint.json, trial_<i>/curve.tsv, trial_<i>/metrics.tsv
// Each trial is evaluated on cfg.eval_episodes frozen-policy episodes.
// Progress lines go to log when it is not null.
RunManifest run_training(const RunConfig& cfg, Agent agent, const std::filesystem::path& out,
                         std::ostream* log = nullptr);

// Frozen-policy evaluation of one checkpoint with the environment from cfg.
EvaluationResult evaluate_checkpoint(const Checkpoint& ckpt, const RunConfig& cfg, int episodes,
                                     bool greedy, std::uint64_t seed);

// Label used in tables: "<mode>/<scenario>".
std::string run_label(const std::string& mode, offense::Scenario scenario);

}  // namespace saricos
