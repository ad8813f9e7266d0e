#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "saricos/policy.hpp"
#include "saricos/smdp.hpp"

namespace saricos {

// a_k = a0 / (1 + k)^p_a drives the inter-skill parameters (slow timescale),
// b_k = b0 / (1 + k)^p_b drives the RAD parameters (fast timescale).
//
// Exponents in (0.5, 1] give sum a_k = sum b_k = inf and finite sums of
// squares. b_k > a_k must hold for every k: the constructor requires
// b0 > a0 and p_b <= p_a, which makes b_k / a_k nondecreasing in k.
class StepSchedule {
 public:
  StepSchedule(double a0, double p_a, double b0, double p_b);

  double a(long k) const;
  double b(long k) const;

  // First k in [0, k_max] with b_k <= a_k, or -1 if there is none.
  long first_ordering_violation(long k_max) const;

  double a0() const { return a0_; }
  double p_a() const { return p_a_; }
  double b0() const { return b0_; }
  double p_b() const { return p_b_; }

 private:
  double a0_, p_a_, b0_, p_b_;
};

// Compact box [lower, upper] applied entrywise (the projection Gamma).
struct ProjectionBox {
  double lower = -1.0;
  double upper = 1.0;

  void validate() const;
  Eigen::MatrixXd project(const Eigen::MatrixXd& m) const;
  bool contains(const Eigen::MatrixXd& m) const;
  // Fraction of entries sitting on a face of the box.
  double saturation(const Eigen::MatrixXd& m) const;
};

struct ProjectionBoxes {
  ProjectionBox alpha{-50.0, 50.0};
  ProjectionBox omega{-300.0, 300.0};
};

enum class Estimator {
  full_return,   // sum_h grad log mu_h * R(tau)
  baseline,      // sum_h grad log mu_h * (R(tau) - V(z_h))
  td_advantage,  // sum_h grad log mu_h * delta_h (actor-critic)
};

std::string to_string(Estimator e);
Estimator estimator_from_string(const std::string& s);

struct GradientEstimate {
  Eigen::MatrixXd grad_alpha;
  Eigen::MatrixXd grad_omega;
  std::size_t batch_size = 0;
  double mean_return = 0.0;
};

// Linear state-value function over the inter-skill features.
struct CriticBaseline {
  Estimator kind = Estimator::td_advantage;
  Eigen::VectorXd weights;
};

// Per-trajectory sample of the estimator; estimate_gradients averages these.
ParamGradient trajectory_gradient(const RiskAwareTrajectory& traj, const TwoTieredPolicy& policy,
                                  double gamma, const CriticBaseline* baseline = nullptr);

GradientEstimate estimate_gradients(const std::vector<RiskAwareTrajectory>& batch,
                                    const TwoTieredPolicy& policy, double gamma,
                                    const CriticBaseline* baseline = nullptr);

// TD errors for every decision of traj under fixed critic weights.
// delta_h = reward_h + gamma^{steps_h} V(z_{h+1}) - V(z_h), with V = 0 after the last decision.
std::vector<double> td_errors(const RiskAwareTrajectory& traj, const Eigen::VectorXd& weights,
                              const FeatureMap& features, double gamma);

struct CriticUpdate {
  Eigen::VectorXd weights;
  std::vector<double> td_errors;
};

// One TD(0) pass over the trajectory. Throws training_error on a non-finite TD error.
CriticUpdate critic_update(const RiskAwareTrajectory& traj, const Eigen::VectorXd& weights,
                           const FeatureMap& features, double gamma, double step);

// alpha <- Gamma_alpha(alpha + a_k grad_alpha), Omega <- Gamma_Omega(Omega + b_k grad_omega).
PolicyParams saricos_step(const PolicyParams& params, const GradientEstimate& grads, long k,
                          const StepSchedule& schedule, const ProjectionBoxes& boxes);

struct TrainConfig {
  EpisodeConfig episode;
  long episodes = 20000;
  int batch_size = 30;
  StepSchedule schedule{1.0, 0.6, 3000.0, 0.55};
  ProjectionBoxes boxes;
  Estimator estimator = Estimator::td_advantage;
  double critic_step = 0.1;
  std::uint64_t seed = 1;
  std::uint64_t trial = 0;
  unsigned workers = 1;

  // Checked every early_stop_window episodes once early_stop_min_episodes have run:
  // stops when the means of the last two windows differ by less than the tolerance.
  bool early_stop = true;
  long early_stop_window = 500;
  double early_stop_tolerance = 1e-3;
  long early_stop_min_episodes = 10000;

  void validate() const;
};

struct CurveRow {
  long iteration = 0;
  long episodes = 0;
  double mean_return = 0.0;
  double success_probability = 0.0;
  double mean_length = 0.0;
  double saturation = 0.0;
};

struct LearningCurve {
  RewardMode mode = RewardMode::pg_smdp;
  std::vector<CurveRow> rows;
};

// Columnar text: a "#" header line carrying schema version and mode tag,
// a column-name row, then one tab-separated row per iteration.
void write_curve(std::ostream& out, const LearningCurve& curve);
LearningCurve read_curve(std::istream& in);

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

struct TrainResult {
  PolicyParams params;
  Eigen::VectorXd critic;
  LearningCurve curve;
  std::vector<std::string> warnings;
  long episodes_run = 0;
  bool early_stopped = false;
};

// Rolls out `batch_size` episodes with the given parameters. Episode e of
// iteration k uses stream derive_rng(seed, {trial, k, e}) regardless of how
// many workers run the batch.
std::vector<RiskAwareTrajectory> rollout_batch(const EnvFactory& make_env, const TwoTieredPolicy& policy,
                                               const EpisodeConfig& episode, int batch_size,
                                               std::uint64_t seed, std::uint64_t trial, long iteration,
                                               unsigned workers);

TrainResult train(const EnvFactory& make_env, const TwoTieredPolicy& init, const TrainConfig& cfg);

}  // namespace saricos
