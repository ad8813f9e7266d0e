#include "saricos/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "saricos/errors.hpp"

namespace saricos {

namespace {

void check_inter_dims(const Eigen::MatrixXd& alpha, const Eigen::VectorXd& phi) {
  if (alpha.cols() != phi.size() || alpha.rows() == 0) {
    throw validation_error("inter-skill parameters are " + std::to_string(alpha.rows()) + "x" +
                           std::to_string(alpha.cols()) + " but the feature vector has " +
                           std::to_string(phi.size()) + " entries");
  }
}

void check_rad_dims(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi) {
  if (omega_i.size() != phi.size()) {
    throw validation_error("RAD parameters have " + std::to_string(omega_i.size()) +
                           " entries but the feature vector has " + std::to_string(phi.size()));
  }
}

void check_variance(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw validation_error("RAD variance must be positive");
}

}  // namespace

void PolicyParams::validate() const {
  if (alpha.rows() == 0 || alpha.rows() != omega.rows()) {
    throw validation_error("alpha and omega must have one row per skill");
  }
  if (!alpha.allFinite() || !omega.allFinite()) throw validation_error("non-finite policy parameters");
  check_variance(variance);
  if (!(clamp.lo <= clamp.hi)) throw validation_error("RAP clamp needs lo <= hi");
}

Eigen::VectorXd inter_skill_probs(const Eigen::MatrixXd& alpha, const Eigen::VectorXd& phi) {
  check_inter_dims(alpha, phi);
  Eigen::VectorXd logits = alpha * phi;
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd p = logits.array().exp();
  p /= p.sum();
  return p;
}

std::size_t sample_skill(const Eigen::VectorXd& probs, rng_t& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<std::size_t>(i);
    cum += probs[i];
    if (u < cum) return last_positive;
  }
  return last_positive;
}

std::size_t greedy_skill(const Eigen::VectorXd& probs) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return static_cast<std::size_t>(best);
}

RapDraw rad_sample(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi, double variance,
                   RapClamp clamp, rng_t& rng) {
  check_rad_dims(omega_i, phi);
  check_variance(variance);
  std::normal_distribution<double> normal(phi.dot(omega_i), std::sqrt(variance));
  const double y = normal(rng);
  return {y, std::clamp(y, clamp.lo, clamp.hi)};
}

double rad_log_density(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi, double y,
                       double variance) {
  check_rad_dims(omega_i, phi);
  check_variance(variance);
  const double d = y - phi.dot(omega_i);
  return -0.5 * d * d / variance - 0.5 * std::log(2.0 * std::numbers::pi * variance);
}

Eigen::MatrixXd log_grad_inter(const Eigen::MatrixXd& alpha, const Eigen::VectorXd& phi,
                               std::size_t chosen) {
  check_inter_dims(alpha, phi);
  if (chosen >= static_cast<std::size_t>(alpha.rows())) throw validation_error("skill index out of range");
  Eigen::VectorXd coeff = -inter_skill_probs(alpha, phi);
  coeff[static_cast<Eigen::Index>(chosen)] += 1.0;
  return coeff * phi.transpose();
}

Eigen::VectorXd log_grad_rad(const Eigen::VectorXd& omega_i, const Eigen::VectorXd& phi, double y,
                             double variance) {
  check_rad_dims(omega_i, phi);
  check_variance(variance);
  return phi * ((y - phi.dot(omega_i)) / variance);
}

double two_tiered_log_prob(const PolicyParams& p, const Eigen::VectorXd& inter_phi,
                           const Eigen::VectorXd& rad_phi, std::size_t sigma, double y) {
  const Eigen::VectorXd probs = inter_skill_probs(p.alpha, inter_phi);
  if (sigma >= static_cast<std::size_t>(probs.size())) throw validation_error("skill index out of range");
  const Eigen::VectorXd omega_i = p.omega.row(static_cast<Eigen::Index>(sigma)).transpose();
  return std::log(probs[static_cast<Eigen::Index>(sigma)]) +
         rad_log_density(omega_i, rad_phi, y, p.variance);
}

ParamGradient two_tiered_log_grad(const PolicyParams& p, const Eigen::VectorXd& inter_phi,
                                  const Eigen::VectorXd& rad_phi, std::size_t sigma, double y) {
  ParamGradient g = ParamGradient::zeros_like(p);
  g.alpha = log_grad_inter(p.alpha, inter_phi, sigma);
  const auto row = static_cast<Eigen::Index>(sigma);
  const Eigen::VectorXd omega_i = p.omega.row(row).transpose();
  g.omega.row(row) = log_grad_rad(omega_i, rad_phi, y, p.variance).transpose();
  return g;
}

TwoTieredPolicy::TwoTieredPolicy(PolicyParams params, std::shared_ptr<const FeatureMap> features)
    : params_(std::move(params)), features_(std::move(features)) {
  if (!features_) throw config_error("policy needs a feature map");
  check_shapes();
}

void TwoTieredPolicy::set_params(PolicyParams params) {
  params_ = std::move(params);
  check_shapes();
}

void TwoTieredPolicy::check_shapes() const {
  params_.validate();
  if (static_cast<std::size_t>(params_.alpha.cols()) != features_->inter_size() ||
      static_cast<std::size_t>(params_.omega.cols()) != features_->rad_size()) {
    throw validation_error("policy parameters are alpha " + std::to_string(params_.alpha.rows()) +
                           "x" + std::to_string(params_.alpha.cols()) + ", omega " +
                           std::to_string(params_.omega.rows()) + "x" +
                           std::to_string(params_.omega.cols()) + " but features need " +
                           std::to_string(features_->inter_size()) + " and " +
                           std::to_string(features_->rad_size()) + " columns");
  }
}

Eigen::VectorXd TwoTieredPolicy::skill_probs(const AugmentedState& z) const {
  return inter_skill_probs(params_.alpha, features_->inter(z));
}

double TwoTieredPolicy::rap_mean(const AugmentedState& z, std::size_t skill) const {
  return features_->rad(z).dot(params_.omega.row(static_cast<Eigen::Index>(skill)).transpose());
}

Decision TwoTieredPolicy::decide(const AugmentedState& z, rng_t& rng) const {
  const Eigen::VectorXd probs = skill_probs(z);
  Decision d;
  d.skill = greedy_ ? greedy_skill(probs) : sample_skill(probs, rng);
  const Eigen::VectorXd phi = features_->rad(z);
  const Eigen::VectorXd omega_i = params_.omega.row(static_cast<Eigen::Index>(d.skill)).transpose();
  if (greedy_) {
    d.rap_raw = phi.dot(omega_i);
    d.rap = std::clamp(d.rap_raw, params_.clamp.lo, params_.clamp.hi);
  } else {
    const RapDraw draw = rad_sample(omega_i, phi, params_.variance, params_.clamp, rng);
    d.rap_raw = draw.raw;
    d.rap = draw.executed;
  }
  return d;
}

}  // namespace saricos
