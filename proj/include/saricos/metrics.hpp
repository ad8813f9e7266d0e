#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "saricos/mini_offense.hpp"
#include "saricos/policy.hpp"
#include "saricos/smdp.hpp"

namespace saricos {

// Evaluation-table record for one batch of episodes (goal / capture / out of time partition).
struct MetricsRecord {
  int episodes = 0;
  int goals = 0;
  int captures = 0;
  int out_of_time = 0;
  double avg_reward = 0.0;          // mean undiscounted sum of base rewards (the final w)
  double avg_episode_length = 0.0;  // mean simulated timesteps
};

MetricsRecord metrics_collect(const std::vector<RiskAwareTrajectory>& batch, RewardMode mode);

struct MetricStat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across trials, 0 for a single trial
};

struct MetricsSummary {
  int trials = 0;
  MetricStat goals, captures, out_of_time, avg_reward, avg_episode_length;
};

MetricsSummary summarize(const std::vector<MetricsRecord>& per_trial);

// Aligned "mean +- std" text table, one column per labelled summary.
void write_metrics_table(std::ostream& out, const std::vector<std::pair<std::string, MetricsSummary>>& columns);

// Tab-separated rows (label, trial, episodes, goals, captures, out_of_time, avg_reward, avg_episode_length).
void write_metrics_columns(std::ostream& out,
                           const std::vector<std::pair<std::string, std::vector<MetricsRecord>>>& runs);

struct EvaluationResult {
  MetricsRecord metrics;
  std::vector<RiskAwareTrajectory> trajectories;
};

// Frozen-policy rollouts; episode e uses derive_rng(seed, {e}).
EvaluationResult evaluate_policy(const offense::OffenseConfig& env_cfg, const TwoTieredPolicy& policy,
                                 const EpisodeConfig& episode, int n_episodes, std::uint64_t seed);

}  // namespace saricos
