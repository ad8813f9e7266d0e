#pragma once

#include <limits>
#include <memory>

#include <Eigen/Core>

#include "saricos/features.hpp"
#include "saricos/random.hpp"
#include "saricos/smdp.hpp"

namespace saricos {

struct RapClamp {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

// Parameters of mu_{alpha,Omega}(sigma, y | z) = mu_alpha(sigma | z) * N(y; phi(z)^T omega_sigma, V).
//   alpha: N skills x F inter-skill features (Gibbs policy)
//   omega: N skills x m RAD features, row i is omega_i
struct PolicyParams {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd omega;
  double variance = 25.0;
  RapClamp clamp;

  std::size_t num_skills() const { return static_cast<std::size_t>(alpha.rows()); }
  void validate() const;
};

// Gradient (or any other quantity) shaped like the learnable part of PolicyParams.
struct ParamGradient {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd omega;

  static ParamGradient zeros_like(const PolicyParams& p) {
    return {Eigen::MatrixXd::Zero(p.alpha.rows(), p.alpha.cols()),
            Eigen::MatrixXd::Zero(p.omega.rows(), p.omega.cols())};
  }
  bool all_finite() const { return alpha.allFinite() && omega.allFinite(); }
};

// Softmax of alpha * phi with the max logit subtracted before exponentiation.
Eigen::VectorXd inter_skill_probs(const Eigen::MatrixXd& alpha, const Eigen::VectorXd& phi);

std::size_t sample_skill(const Eigen::VectorXd& probs, rng_t& rng);

// Lowest index among the maximal entries.
std::size_t greedy_skill(const Eigen::VectorXd& probs);

struct RapDraw {
  double raw = 0.0;       // Gaussian draw, used for the log-likelihood gradient
  double executed = 0.0;  // raw clamped to the RAP range, handed to the skill
};

RapDraw rad_sample(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi, double variance,
                   RapClamp clamp, rng_t& rng);

double rad_log_density(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi, double y,
                       double variance);

// Row i is (1{i == chosen} - p_i) * phi.
Eigen::MatrixXd log_grad_inter(const Eigen::MatrixXd& alpha, const Eigen::VectorXd& phi,
                               std::size_t chosen);

// phi * (y - phi^T omega_i) / V.
Eigen::VectorXd log_grad_rad(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi, double y,
                             double variance);

double two_tiered_log_prob(const PolicyParams& p, const Eigen::VectorXd& inter_phi,
                           const Eigen::VectorXd& rad_phi, std::size_t sigma, double y);

// Gradient of two_tiered_log_prob; omega rows other than sigma are zero.
ParamGradient two_tiered_log_grad(const PolicyParams& p, const Eigen::VectorXd& inter_phi,
                                  const Eigen::VectorXd& rad_phi, std::size_t sigma, double y);

class TwoTieredPolicy : public SkillSelector {
 public:
  TwoTieredPolicy(PolicyParams params, std::shared_ptr<const FeatureMap> features);

  Decision decide(const AugmentedState& z, rng_t& rng) const override;

  // Greedy mode picks the most probable skill and runs it at the RAD mean.
  void set_greedy(bool greedy) { greedy_ = greedy; }
  bool greedy() const { return greedy_; }

  const PolicyParams& params() const { return params_; }
  void set_params(PolicyParams params);
  const FeatureMap& features() const { return *features_; }
  std::shared_ptr<const FeatureMap> feature_map() const { return features_; }

  Eigen::VectorXd skill_probs(const AugmentedState& z) const;
  double rap_mean(const AugmentedState& z, std::size_t skill) const;

 private:
  void check_shapes() const;

  PolicyParams params_;
  std::shared_ptr<const FeatureMap> features_;
  bool greedy_ = false;
};

}  // namespace saricos
