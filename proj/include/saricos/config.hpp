#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "saricos/errors.hpp"
#include "saricos/features.hpp"
#include "saricos/learner.hpp"
#include "saricos/mini_offense.hpp"
#include "saricos/smdp.hpp"

namespace saricos {

inline constexpr int kConfigSchemaVersion = 1;

// Everything a training or evaluation run reads from its INI file.
// Sections: [run], [episode], [policy], [learner], [env], [rewards], [eval].
struct RunConfig {
  std::uint64_t seed = 1;
  int trials = 3;

  EpisodeConfig episode;
  offense::OffenseConfig env;

  double initial_rap = 110.0;
  double variance = 100.0;
  int fourier_order = 3;

  long episodes = 20000;
  int batch_size = 30;
  double a0 = 1.0;
  double p_a = 0.6;
  double b0 = 3000.0;
  double p_b = 0.55;
  double alpha_bound = 50.0;
  double omega_bound = 300.0;
  Estimator estimator = Estimator::td_advantage;
  double critic_step = 0.1;
  bool early_stop = false;
  long early_stop_window = 500;
  double early_stop_tolerance = 1e-3;
  long early_stop_min_episodes = 10000;
  unsigned workers = 1;

  int eval_episodes = 100;
  bool eval_greedy = false;

  // Learner settings for one trial; ER runs get their gamma from ErConfig.
  TrainConfig train_config(std::uint64_t trial_seed, std::uint64_t trial) const;
  FeatureSpec inter_spec() const;
};

// Validation failure carrying one message per problem found.
class invalid_config : public config_error {
 public:
  explicit invalid_config(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Every problem with the values in cfg; empty when the config is usable.
std::vector<std::string> validate_config(const RunConfig& cfg);

// Parses INI text on top of the defaults. Unknown sections or keys and
// unparsable values are reported together with the semantic checks.
RunConfig parse_config(const std::string& text);

// Throws io_error when the file cannot be read and invalid_config when it does not validate.
RunConfig load_config(const std::filesystem::path& path);

// Sets one key from its text form; throws invalid_config on an unknown key or bad value.
void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value);

// Every key in a fixed order with shortest round-trip number formatting, so
// equal configs give equal text.
std::string canonical_config(const RunConfig& cfg);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// SHA-256 of canonical_config(cfg).
std::string config_hash(const RunConfig& cfg);

}  // namespace saricos
