#include "saricos/er_baseline.hpp"

namespace saricos {

ErConfig::ErConfig(TrainConfig base) : cfg_(std::move(base)) {
  cfg_.episode.mode = RewardMode::expected_return;
  cfg_.episode.gamma = kGamma;
  cfg_.validate();
}

TrainResult train_er(const EnvFactory& make_env, const TwoTieredPolicy& init, const ErConfig& cfg) {
  return train(make_env, init, cfg.train_config());
}

}  // namespace saricos
