#include "saricos/learner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "saricos/errors.hpp"

namespace saricos {

StepSchedule::StepSchedule(double a0, double p_a, double b0, double p_b)
    : a0_(a0), p_a_(p_a), b0_(b0), p_b_(p_b) {
  if (!(a0 > 0.0) || !(b0 > 0.0)) throw config_error("step sizes a0 and b0 must be positive");
  if (!(p_a > 0.5 && p_a <= 1.0)) throw config_error("exponent p_a must lie in (0.5, 1]");
  if (!(p_b > 0.5 && p_b <= 1.0)) throw config_error("exponent p_b must lie in (0.5, 1]");
  if (!(b0 > a0)) throw config_error("schedule needs b_0 > a_0 (RAD steps must exceed inter-skill steps)");
  if (p_b > p_a) throw config_error("schedule needs p_b <= p_a, otherwise b_k falls below a_k for large k");
}

double StepSchedule::a(long k) const { return a0_ / std::pow(1.0 + static_cast<double>(k), p_a_); }
double StepSchedule::b(long k) const { return b0_ / std::pow(1.0 + static_cast<double>(k), p_b_); }

long StepSchedule::first_ordering_violation(long k_max) const {
  for (long k = 0; k <= k_max; ++k) {
    if (!(b(k) > a(k))) return k;
  }
  return -1;
}

void ProjectionBox::validate() const {
  if (!(lower < upper)) throw config_error("projection box needs lower < upper");
}

Eigen::MatrixXd ProjectionBox::project(const Eigen::MatrixXd& m) const {
  return m.cwiseMax(lower).cwiseMin(upper);
}

bool ProjectionBox::contains(const Eigen::MatrixXd& m) const {
  return (m.array() >= lower).all() && (m.array() <= upper).all();
}

double ProjectionBox::saturation(const Eigen::MatrixXd& m) const {
  if (m.size() == 0) return 0.0;
  const auto on_face = ((m.array() <= lower) || (m.array() >= upper)).count();
  return static_cast<double>(on_face) / static_cast<double>(m.size());
}

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::full_return: return "full_return";
    case Estimator::baseline: return "baseline";
    case Estimator::td_advantage: return "td_advantage";
  }
  return "?";
}

Estimator estimator_from_string(const std::string& s) {
  if (s == "full_return") return Estimator::full_return;
  if (s == "baseline") return Estimator::baseline;
  if (s == "td_advantage") return Estimator::td_advantage;
  throw config_error("unknown estimator '" + s + "'");
}

std::vector<double> td_errors(const RiskAwareTrajectory& traj, const Eigen::VectorXd& weights,
                              const FeatureMap& features, double gamma) {
  std::vector<double> deltas;
  deltas.reserve(traj.steps.size());
  double v = traj.steps.empty() ? 0.0 : weights.dot(features.inter(traj.steps.front().z));
  for (std::size_t h = 0; h < traj.steps.size(); ++h) {
    const auto& s = traj.steps[h];
    const bool last = h + 1 == traj.steps.size();
    const double v_next = last ? 0.0 : weights.dot(features.inter(s.z_next));
    deltas.push_back(s.reward + std::pow(gamma, s.steps) * v_next - v);
    v = v_next;
  }
  return deltas;
}

ParamGradient trajectory_gradient(const RiskAwareTrajectory& traj, const TwoTieredPolicy& policy,
                                  double gamma, const CriticBaseline* baseline) {
  const PolicyParams& p = policy.params();
  const FeatureMap& fm = policy.features();
  ParamGradient g = ParamGradient::zeros_like(p);
  if (traj.steps.empty()) return g;

  const double ret = traj.discounted_return(gamma);
  std::vector<double> weight(traj.steps.size(), ret);
  if (baseline != nullptr && baseline->kind == Estimator::td_advantage) {
    weight = td_errors(traj, baseline->weights, fm, gamma);
  } else if (baseline != nullptr && baseline->kind == Estimator::baseline) {
    for (std::size_t h = 0; h < traj.steps.size(); ++h) {
      weight[h] = ret - baseline->weights.dot(fm.inter(traj.steps[h].z));
    }
  }

  for (std::size_t h = 0; h < traj.steps.size(); ++h) {
    const auto& s = traj.steps[h];
    if (s.skill >= p.num_skills() || !std::isfinite(s.rap_raw)) {
      throw validation_error("trajectory does not match the policy (skill " + std::to_string(s.skill) + ")");
    }
    if (weight[h] == 0.0) continue;
    const Eigen::VectorXd phi = fm.inter(s.z);
    const Eigen::VectorXd psi = fm.rad(s.z);
    g.alpha += weight[h] * log_grad_inter(p.alpha, phi, s.skill);
    const auto row = static_cast<Eigen::Index>(s.skill);
    const Eigen::VectorXd omega_i = p.omega.row(row).transpose();
    g.omega.row(row) += weight[h] * log_grad_rad(omega_i, psi, s.rap_raw, p.variance).transpose();
  }
  return g;
}

GradientEstimate estimate_gradients(const std::vector<RiskAwareTrajectory>& batch,
                                    const TwoTieredPolicy& policy, double gamma,
                                    const CriticBaseline* baseline) {
  if (batch.empty()) throw validation_error("cannot estimate gradients from an empty batch");
  ParamGradient sum = ParamGradient::zeros_like(policy.params());
  double ret = 0.0;
  for (const auto& traj : batch) {
    const ParamGradient g = trajectory_gradient(traj, policy, gamma, baseline);
    sum.alpha += g.alpha;
    sum.omega += g.omega;
    ret += traj.discounted_return(gamma);
  }
  const double n = static_cast<double>(batch.size());
  return {sum.alpha / n, sum.omega / n, batch.size(), ret / n};
}

CriticUpdate critic_update(const RiskAwareTrajectory& traj, const Eigen::VectorXd& weights,
                           const FeatureMap& features, double gamma, double step) {
  if (static_cast<std::size_t>(weights.size()) != features.inter_size()) {
    throw validation_error("critic has " + std::to_string(weights.size()) + " weights, features have " +
                           std::to_string(features.inter_size()));
  }
  CriticUpdate out{weights, {}};
  out.td_errors.reserve(traj.steps.size());
  for (std::size_t h = 0; h < traj.steps.size(); ++h) {
    const auto& s = traj.steps[h];
    const bool last = h + 1 == traj.steps.size();
    const Eigen::VectorXd phi = features.inter(s.z);
    const double v_next = last ? 0.0 : out.weights.dot(features.inter(s.z_next));
    const double delta = s.reward + std::pow(gamma, s.steps) * v_next - out.weights.dot(phi);
    if (!std::isfinite(delta)) {
      std::ostringstream msg;
      msg << "critic TD error is not finite at decision " << h << " (t=" << s.z.t << ", reward=" << s.reward
          << ", |w|=" << out.weights.norm() << ")";
      throw training_error(msg.str(), static_cast<long>(h));
    }
    out.weights += step * delta * phi;
    out.td_errors.push_back(delta);
  }
  return out;
}

PolicyParams saricos_step(const PolicyParams& params, const GradientEstimate& grads, long k,
                          const StepSchedule& schedule, const ProjectionBoxes& boxes) {
  if (k < 0) throw contract_error("iteration index must be nonnegative");
  if (grads.grad_alpha.rows() != params.alpha.rows() || grads.grad_alpha.cols() != params.alpha.cols() ||
      grads.grad_omega.rows() != params.omega.rows() || grads.grad_omega.cols() != params.omega.cols()) {
    throw validation_error("gradient shapes do not match the parameters");
  }
  if (!grads.grad_alpha.allFinite() || !grads.grad_omega.allFinite()) {
    throw training_error("non-finite gradient entries, step rejected", k);
  }
  PolicyParams next = params;
  next.alpha = boxes.alpha.project(params.alpha + schedule.a(k) * grads.grad_alpha);
  next.omega = boxes.omega.project(params.omega + schedule.b(k) * grads.grad_omega);
  return next;
}

void TrainConfig::validate() const {
  episode.validate();
  boxes.alpha.validate();
  boxes.omega.validate();
  if (episodes < 1) throw config_error("episode budget must be positive");
  if (batch_size < 1) throw config_error("batch size must be positive");
  if (!(critic_step >= 0.0)) throw config_error("critic step must be nonnegative");
  if (early_stop && early_stop_window < 1) throw config_error("early-stop window must be positive");
}

void write_curve(std::ostream& out, const LearningCurve& curve) {
  out << "# saricos-curve schema_version=1 mode="
      << (curve.mode == RewardMode::pg_smdp ? "saricos" : "er") << '\n';
  out << "iteration\tepisodes\tmean_return\tsuccess_probability\tmean_episode_length\tprojection_saturation\n";
  out << std::setprecision(10);
  for (const auto& r : curve.rows) {
    out << r.iteration << '\t' << r.episodes << '\t' << r.mean_return << '\t' << r.success_probability << '\t'
        << r.mean_length << '\t' << r.saturation << '\n';
  }
}

LearningCurve read_curve(std::istream& in) {
  LearningCurve curve;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# saricos-curve", 0) != 0) {
    throw validation_error("learning curve is missing its header");
  }
  curve.mode = line.find("mode=er") != std::string::npos ? RewardMode::expected_return : RewardMode::pg_smdp;
  std::getline(in, line);  // column names
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    CurveRow r;
    if (!(ss >> r.iteration >> r.episodes >> r.mean_return >> r.success_probability >> r.mean_length >>
          r.saturation)) {
      throw validation_error("malformed learning-curve row: " + line);
    }
    curve.rows.push_back(r);
  }
  return curve;
}

std::vector<RiskAwareTrajectory> rollout_batch(const EnvFactory& make_env, const TwoTieredPolicy& policy,
                                               const EpisodeConfig& episode, int batch_size,
                                               std::uint64_t seed, std::uint64_t trial, long iteration,
                                               unsigned workers) {
  std::vector<RiskAwareTrajectory> batch(static_cast<std::size_t>(batch_size));
  auto run_range = [&](std::size_t begin, std::size_t stride) {
    auto env = make_env();
    for (std::size_t e = begin; e < batch.size(); e += stride) {
      auto rng = derive_rng(seed, {trial, static_cast<std::uint64_t>(iteration), e});
      batch[e] = run_episode(*env, policy, episode, rng);
    }
  };
  const std::size_t n_workers = std::clamp<std::size_t>(workers, 1, batch.size());
  if (n_workers == 1) {
    run_range(0, 1);
    return batch;
  }
  std::vector<std::exception_ptr> errors(n_workers);
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < n_workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          run_range(w, n_workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return batch;
}

TrainResult train(const EnvFactory& make_env, const TwoTieredPolicy& init, const TrainConfig& cfg) {
  cfg.validate();
  TwoTieredPolicy policy = init;
  const FeatureMap& fm = policy.features();
  const double gamma = cfg.episode.gamma;

  TrainResult result;
  result.curve.mode = cfg.episode.mode;
  result.critic = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fm.inter_size()));

  std::deque<double> recent;  // last 2 * window episode returns
  const std::size_t history = static_cast<std::size_t>(2 * std::max(1L, cfg.early_stop_window));
  int saturated_streak = 0;
  bool warned_divergence = false;
  long next_check = std::max(cfg.early_stop_min_episodes, 2 * cfg.early_stop_window);

  for (long k = 0; result.episodes_run < cfg.episodes; ++k) {
    const int n = static_cast<int>(std::min<long>(cfg.batch_size, cfg.episodes - result.episodes_run));
    const auto batch = rollout_batch(make_env, policy, cfg.episode, n, cfg.seed, cfg.trial, k, cfg.workers);

    std::optional<CriticBaseline> baseline;
    if (cfg.estimator != Estimator::full_return) baseline = CriticBaseline{cfg.estimator, result.critic};
    const GradientEstimate grads = estimate_gradients(batch, policy, gamma, baseline ? &*baseline : nullptr);
    policy.set_params(saricos_step(policy.params(), grads, k, cfg.schedule, cfg.boxes));

    if (baseline) {
      for (const auto& traj : batch) result.critic = critic_update(traj, result.critic, fm, gamma, cfg.critic_step).weights;
    }

    result.episodes_run += n;
    const auto& p = policy.params();
    CurveRow row;
    row.iteration = k;
    row.episodes = result.episodes_run;
    row.mean_return = grads.mean_return;
    row.success_probability = success_probability_estimate(batch, cfg.episode.beta);
    double len = 0.0;
    for (const auto& t : batch) len += t.env_length;
    row.mean_length = len / static_cast<double>(batch.size());
    const double entries = static_cast<double>(p.alpha.size() + p.omega.size());
    row.saturation = (cfg.boxes.alpha.saturation(p.alpha) * static_cast<double>(p.alpha.size()) +
                      cfg.boxes.omega.saturation(p.omega) * static_cast<double>(p.omega.size())) /
                     entries;
    result.curve.rows.push_back(row);

    saturated_streak = row.saturation > 0.9 ? saturated_streak + 1 : 0;
    if (saturated_streak >= 10 && !warned_divergence) {
      result.warnings.push_back("iteration " + std::to_string(k) +
                                ": more than 90% of parameters pinned to the projection box for 10 iterations");
      warned_divergence = true;
    }

    if (cfg.early_stop) {
      for (const auto& t : batch) {
        recent.push_back(t.discounted_return(gamma));
        if (recent.size() > history) recent.pop_front();
      }
      if (recent.size() == history && result.episodes_run >= next_check) {
        while (next_check <= result.episodes_run) next_check += cfg.early_stop_window;
        const auto w = static_cast<std::ptrdiff_t>(cfg.early_stop_window);
        double older = 0.0, newer = 0.0;
        for (std::ptrdiff_t i = 0; i < w; ++i) {
          older += recent[static_cast<std::size_t>(i)];
          newer += recent[static_cast<std::size_t>(i + w)];
        }
        if (std::abs(newer - older) / static_cast<double>(w) < cfg.early_stop_tolerance) {
          result.early_stopped = true;
          break;
        }
      }
    }
  }
  result.params = policy.params();
  return result;
}

}  // namespace saricos
