#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "saricos/features.hpp"
#include "saricos/policy.hpp"

namespace saricos {

inline constexpr int kCheckpointSchemaVersion = 1;

// Versioned JSON document holding everything needed to rebuild a policy.
// Infinite clamp bounds are written as null.
struct Checkpoint {
  PolicyParams params;
  FeatureSpec inter_spec;
  std::string rad_kind;
  std::string mode = "saricos";
  std::vector<std::uint64_t> seed_lineage;
  std::map<std::string, std::string> metadata;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace saricos
