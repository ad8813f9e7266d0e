#pragma once

#include "saricos/learner.hpp"

namespace saricos {

// Training configuration for the expected-return comparison agent: the same
// learner, but rewarded with the shaped base rewards at every timestep and
// discounted by gamma = 0.99. The reward mode cannot be changed afterwards.
class ErConfig {
 public:
  static constexpr double kGamma = 0.99;

  explicit ErConfig(TrainConfig base);

  const TrainConfig& train_config() const { return cfg_; }
  RewardMode mode() const { return cfg_.episode.mode; }

 private:
  TrainConfig cfg_;
};

TrainResult train_er(const EnvFactory& make_env, const TwoTieredPolicy& init, const ErConfig& cfg);

}  // namespace saricos
