#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "saricos/random.hpp"

namespace saricos {

// Raw environment state; dimensionality is fixed per environment.
struct EnvState {
  std::vector<double> features;

  bool operator==(const EnvState&) const = default;
};

// PG-SMDP state: environment state plus undiscounted reward accumulated since
// the episode began and the elapsed timestep.
struct AugmentedState {
  EnvState env;
  double w = 0.0;
  int t = 0;

  bool operator==(const AugmentedState&) const = default;
};

enum class RewardMode {
  pg_smdp,          // terminal indicator of w >= beta at t == T
  expected_return,  // shaped base rewards at every timestep
};

std::string to_string(RewardMode mode);
RewardMode reward_mode_from_string(const std::string& s);

struct EpisodeConfig {
  int horizon = 150;
  double beta = 1.0;
  double gamma = 1.0;
  RewardMode mode = RewardMode::pg_smdp;

  // Throws validation_error unless horizon >= 1 and gamma in [0, 1].
  void validate() const;
};

// What a skill did when executed to termination (or until the step budget ran out).
struct SkillResult {
  int steps = 0;                      // timesteps consumed, >= 1
  std::vector<double> step_rewards;   // one base reward per timestep consumed
  EnvState next;
  bool terminated = false;            // environment reached an absorbing state
  int event = 0;                      // environment-defined terminal event, 0 if none
  bool fallback = false;              // requested skill was not initiable
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t num_skills() const = 0;
  virtual EnvState reset(rng_t& rng) = 0;

  // Runs the skill until its termination rule fires, the environment reaches an
  // absorbing state, or max_steps timesteps have elapsed.
  virtual SkillResult execute(std::size_t skill, double rap, int max_steps, rng_t& rng) = 0;
};

// One decision of the two-tiered policy.
struct Decision {
  std::size_t skill = 0;
  double rap_raw = 0.0;  // draw from the risk-aware distribution
  double rap = 0.0;      // value handed to the skill (after clamping)
};

class SkillSelector {
 public:
  virtual ~SkillSelector() = default;
  virtual Decision decide(const AugmentedState& z, rng_t& rng) const = 0;
};

struct TrajectoryStep {
  AugmentedState z;
  std::size_t skill = 0;
  double rap = 0.0;
  double rap_raw = 0.0;
  int steps = 0;
  double base_reward = 0.0;  // undiscounted sum of base rewards over the skill
  double aug_reward = 0.0;   // indicator reward evaluated at z_next
  double reward = 0.0;       // learning signal: aug_reward, or the within-skill discounted base reward
  bool fallback = false;
  AugmentedState z_next;
};

struct RiskAwareTrajectory {
  std::vector<TrajectoryStep> steps;
  bool terminal_flag = false;  // horizon T reached (possibly through the absorbing state)
  int event = 0;               // terminal event reported by the environment, 0 for timeout
  int env_length = 0;          // timesteps actually simulated before absorption or timeout

  double final_w() const { return steps.empty() ? 0.0 : steps.back().z_next.w; }
  // sum_h gamma^{t_h} * reward_h
  double discounted_return(double gamma) const;
  double augmented_return() const;
};

// z' = {next_env, w + skill_reward, t + elapsed}. Non-finite rewards are rejected.
AugmentedState augment_transition(const AugmentedState& z, double skill_reward,
                                  const EnvState& next_env, int elapsed = 1);

// 1 iff t == T and w >= beta, else 0. Throws contract_error when t is outside [0, T].
double augmented_reward(int t, int horizon, double w, double beta);

// Resets env and rolls out one episode. An early absorbing state jumps the
// augmented clock to T with no further reward, so the indicator is always
// evaluated at t == T.
RiskAwareTrajectory run_episode(Environment& env, const SkillSelector& policy,
                                const EpisodeConfig& cfg, rng_t& rng);

// Fraction of trajectories whose final w reaches beta.
double success_probability_estimate(const std::vector<RiskAwareTrajectory>& batch, double beta);

// Batch mean of the undiscounted augmented return.
double mean_augmented_return(const std::vector<RiskAwareTrajectory>& batch);

}  // namespace saricos
