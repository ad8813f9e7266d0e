#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "saricos/features.hpp"
#include "saricos/policy.hpp"
#include "saricos/smdp.hpp"

namespace saricos {

// Small finite SMDP whose trajectories can all be enumerated. Skills last one
// timestep; the environment only sees which bin of `rap_thresholds` the RAP
// falls into, so the Gaussian RAD induces a discrete distribution over bins.
struct TinyMdpFixture {
  int num_states = 2;
  int num_skills = 2;
  std::vector<double> rap_thresholds;  // ascending, at most 2 (<= 3 bins)
  int initial_state = 0;
  int horizon = 3;
  // transition[((s * K + k) * B + b) * S + s'] and reward[(s * K + k) * B + b]
  std::vector<double> transition;
  std::vector<double> reward;

  int num_bins() const { return static_cast<int>(rap_thresholds.size()) + 1; }
  int bin_of(double y) const;
  double p(int s, int k, int b, int s2) const;
  double r(int s, int k, int b) const;
  // Number of leaf paths a full enumeration visits: (K * B * S)^T.
  double enumeration_size() const;
  void validate() const;

  // Two states, two skills, three bins; every parameter affects J.
  static TinyMdpFixture two_state();
  // Skill 1 always earns more than skill 0, whatever the RAP.
  static TinyMdpFixture dominant_skill();
  // Every path earns the same total reward.
  static TinyMdpFixture constant_return(double c);
};

class TinyMdpEnv : public Environment {
 public:
  explicit TinyMdpEnv(TinyMdpFixture fixture);

  std::size_t state_dim() const override { return static_cast<std::size_t>(fx_.num_states); }
  std::size_t num_skills() const override { return static_cast<std::size_t>(fx_.num_skills); }
  EnvState reset(rng_t& rng) override;
  SkillResult execute(std::size_t skill, double rap, int max_steps, rng_t& rng) override;

  const TinyMdpFixture& fixture() const { return fx_; }

 private:
  EnvState encode(int s) const;

  TinyMdpFixture fx_;
  int state_ = 0;
};

// Inter-skill features: raw [1, s / (S - 1), w]; RAD features: raw [1, s / (S - 1)].
std::shared_ptr<FeatureMap> tiny_feature_map(const TinyMdpFixture& fixture, Bounds w_bounds = {-2.0, 2.0});

// Policy with the given parameters and no RAP clamping (the bins do the discretisation).
PolicyParams tiny_zero_params(const FeatureMap& fm, int num_skills, double variance = 1.0);

struct ExactGradient {
  double objective = 0.0;
  ParamGradient grad;
  std::uint64_t paths = 0;
};

inline constexpr double kMaxEnumeration = 1e6;

// J = sum_tau P(tau) R(tau) and grad J = sum_tau P(tau) R(tau) grad log P(tau) by full
// enumeration, with R(tau) computed exactly as run_episode and the estimators do.
// Throws validation_error (quoting the path count) when the fixture is too large.
ExactGradient brute_force_gradient(const TinyMdpFixture& fixture, const PolicyParams& params,
                                   const FeatureMap& fm, const EpisodeConfig& cfg);

double exact_objective(const TinyMdpFixture& fixture, const PolicyParams& params, const FeatureMap& fm,
                       const EpisodeConfig& cfg);

// Central differences of exact_objective.
ParamGradient finite_difference_gradient(const TinyMdpFixture& fixture, const PolicyParams& params,
                                         const FeatureMap& fm, const EpisodeConfig& cfg, double h = 1e-6);

// max_i |a_i - b_i| / max(max_i |a_i|, max_i |b_i|, floor)
double relative_error(const ParamGradient& a, const ParamGradient& b, double floor = 1e-12);

}  // namespace saricos
