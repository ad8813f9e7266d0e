#include "saricos/smdp.hpp"

#include <cmath>
#include <exception>

#include "saricos/errors.hpp"

namespace saricos {

std::string to_string(RewardMode mode) {
  return mode == RewardMode::pg_smdp ? "pg_smdp" : "expected_return";
}

RewardMode reward_mode_from_string(const std::string& s) {
  if (s == "pg_smdp" || s == "saricos") return RewardMode::pg_smdp;
  if (s == "expected_return" || s == "er") return RewardMode::expected_return;
  throw validation_error("unknown reward mode '" + s + "'");
}

void EpisodeConfig::validate() const {
  if (horizon < 1) throw validation_error("episode horizon must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw validation_error("gamma must lie in [0, 1]");
  if (!std::isfinite(beta)) throw validation_error("beta must be finite");
}

double RiskAwareTrajectory::discounted_return(double gamma) const {
  double ret = 0.0;
  for (const auto& s : steps) ret += std::pow(gamma, s.z.t) * s.reward;
  return ret;
}

double RiskAwareTrajectory::augmented_return() const {
  double ret = 0.0;
  for (const auto& s : steps) ret += s.aug_reward;
  return ret;
}

AugmentedState augment_transition(const AugmentedState& z, double skill_reward,
                                  const EnvState& next_env, int elapsed) {
  if (!std::isfinite(skill_reward)) throw validation_error("skill reward is not finite");
  if (elapsed < 0) throw validation_error("elapsed steps must be nonnegative");
  return AugmentedState{next_env, z.w + skill_reward, z.t + elapsed};
}

double augmented_reward(int t, int horizon, double w, double beta) {
  if (t < 0 || t > horizon) {
    throw contract_error("augmented_reward: t=" + std::to_string(t) + " outside [0, " +
                         std::to_string(horizon) + "]");
  }
  if (t < horizon) return 0.0;
  return w >= beta ? 1.0 : 0.0;
}

RiskAwareTrajectory run_episode(Environment& env, const SkillSelector& policy,
                                const EpisodeConfig& cfg, rng_t& rng) {
  cfg.validate();
  RiskAwareTrajectory traj;
  AugmentedState z{env.reset(rng), 0.0, 0};
  if (z.env.features.size() != env.state_dim()) {
    throw validation_error("environment reset returned a state of the wrong dimension");
  }

  while (z.t < cfg.horizon) {
    const Decision d = policy.decide(z, rng);
    const int budget = cfg.horizon - z.t;

    SkillResult res;
    try {
      res = env.execute(d.skill, d.rap, budget, rng);
    } catch (const std::exception& e) {
      throw step_error(e.what(), z.t);
    }
    if (res.steps < 1 || res.steps > budget ||
        res.step_rewards.size() != static_cast<std::size_t>(res.steps)) {
      throw step_error("skill reported an inconsistent step count", z.t);
    }

    double base = 0.0;
    double discounted = 0.0;
    double g = 1.0;
    for (double r : res.step_rewards) {
      base += r;
      discounted += g * r;
      g *= cfg.gamma;
    }

    TrajectoryStep step;
    step.z = z;
    step.skill = d.skill;
    step.rap = d.rap;
    step.rap_raw = d.rap_raw;
    step.steps = res.steps;
    step.base_reward = base;
    step.fallback = res.fallback;
    step.z_next = augment_transition(z, base, res.next, res.steps);
    traj.env_length = step.z_next.t;
    if (res.terminated) step.z_next.t = cfg.horizon;  // absorbing until T
    step.aug_reward = augmented_reward(step.z_next.t, cfg.horizon, step.z_next.w, cfg.beta);
    step.reward = cfg.mode == RewardMode::pg_smdp ? step.aug_reward : discounted;
    traj.steps.push_back(std::move(step));

    z = traj.steps.back().z_next;
    if (res.terminated) {
      traj.event = res.event;
      break;
    }
  }
  traj.terminal_flag = z.t == cfg.horizon;
  return traj;
}

double success_probability_estimate(const std::vector<RiskAwareTrajectory>& batch, double beta) {
  if (batch.empty()) throw validation_error("success probability of an empty batch");
  std::size_t hits = 0;
  for (const auto& tr : batch) {
    if (tr.final_w() >= beta) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

double mean_augmented_return(const std::vector<RiskAwareTrajectory>& batch) {
  if (batch.empty()) throw validation_error("mean return of an empty batch");
  double total = 0.0;
  for (const auto& tr : batch) total += tr.augmented_return();
  return total / static_cast<double>(batch.size());
}

}  // namespace saricos
