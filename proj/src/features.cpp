#include "saricos/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "saricos/errors.hpp"

namespace saricos {

std::size_t FeatureSpec::feature_count() const {
  const std::size_t d = dims();
  if (kind == FeatureKind::raw) return 1 + d;
  if (!coupled) return 1 + static_cast<std::size_t>(order) * d;
  std::size_t n = 1;
  for (std::size_t i = 0; i < d; ++i) n *= static_cast<std::size_t>(order + 1);
  return n;
}

void FeatureSpec::validate() const {
  if (order < 0) throw config_error("fourier order must be nonnegative");
  for (const auto& b : bounds) {
    if (!(b.lo < b.hi)) throw config_error("feature bounds need lo < hi");
  }
  if (kind == FeatureKind::fourier && coupled && feature_count() > (1u << 20)) {
    throw config_error("coupled fourier basis is too large");
  }
}

std::string to_string(FeatureKind kind) { return kind == FeatureKind::fourier ? "fourier" : "raw"; }

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "fourier") return FeatureKind::fourier;
  if (s == "raw") return FeatureKind::raw;
  throw config_error("unknown feature kind '" + s + "'");
}

Eigen::VectorXd normalize_state(std::span<const double> s, const std::vector<Bounds>& bounds,
                                ClampCounter* counter) {
  if (s.size() != bounds.size()) {
    throw validation_error("state has " + std::to_string(s.size()) + " dims, feature spec expects " +
                           std::to_string(bounds.size()));
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    double v = (s[i] - bounds[i].lo) / (bounds[i].hi - bounds[i].lo);
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      if (counter) counter->add();
    }
    out[static_cast<Eigen::Index>(i)] = v;
  }
  return out;
}

Eigen::VectorXd fourier_features(std::span<const double> s, const FeatureSpec& spec,
                                 ClampCounter* counter) {
  const Eigen::VectorXd x = normalize_state(s, spec.bounds, counter);
  const auto d = static_cast<Eigen::Index>(spec.dims());
  Eigen::VectorXd phi(static_cast<Eigen::Index>(spec.feature_count()));

  if (spec.kind == FeatureKind::raw) {
    phi[0] = 1.0;
    phi.tail(d) = x;
    return phi;
  }

  constexpr double pi = std::numbers::pi;
  if (!spec.coupled) {
    phi[0] = 1.0;
    Eigen::Index k = 1;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (int c = 1; c <= spec.order; ++c) phi[k++] = std::cos(pi * c * x[i]);
    }
    return phi;
  }

  // Enumerate coefficient vectors as base-(order+1) counters, first dim fastest.
  std::vector<int> c(static_cast<std::size_t>(d), 0);
  for (Eigen::Index k = 0; k < phi.size(); ++k) {
    double dot = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) dot += c[static_cast<std::size_t>(i)] * x[i];
    phi[k] = std::cos(pi * dot);
    for (auto& ci : c) {
      if (++ci <= spec.order) break;
      ci = 0;
    }
  }
  return phi;
}

Eigen::VectorXd fourier_features(const AugmentedState& z, const FeatureSpec& spec,
                                 ClampCounter* counter) {
  std::vector<double> s = z.env.features;
  s.push_back(z.w);
  s.push_back(static_cast<double>(z.t));
  return fourier_features(s, spec, counter);
}

Eigen::VectorXd rad_raw_features(const AugmentedState& z, const RadAdapter* adapter) {
  if (adapter == nullptr) throw config_error("rad_features needs an environment adapter");
  const auto agent = adapter->agent_position(z.env);
  const auto goal = adapter->goal_position();
  if (!agent) throw config_error("environment adapter does not expose the agent position");
  if (!goal) throw config_error("environment adapter does not expose the goal position");

  Eigen::VectorXd phi(static_cast<Eigen::Index>(kRadFeatureCount));
  phi << 1.0, agent->x, agent->y, z.w, std::hypot(agent->x - goal->x, agent->y - goal->y);
  return phi;
}

Eigen::VectorXd rad_features(const AugmentedState& z, const RadAdapter* adapter,
                             ClampCounter* counter) {
  Eigen::VectorXd phi = rad_raw_features(z, adapter);
  const Eigen::VectorXd raw = phi.tail(4);
  const std::vector<Bounds> bounds = {adapter->x_bounds(), adapter->y_bounds(), adapter->w_bounds(),
                                      adapter->distance_bounds()};
  // Centred on [-1, 1] so the intercept and the positional terms are not collinear.
  phi.tail(4) = 2.0 * normalize_state(std::span<const double>(raw.data(), 4), bounds, counter).array() - 1.0;
  return phi;
}

LinearFeatureMap::LinearFeatureMap(FeatureSpec inter_spec, observer inter_obs, std::size_t rad_size,
                                   rad_function rad_fn, std::string rad_kind)
    : spec_(std::move(inter_spec)),
      observe_(std::move(inter_obs)),
      inter_size_(spec_.feature_count()),
      rad_size_(rad_size),
      rad_fn_(std::move(rad_fn)),
      rad_kind_(std::move(rad_kind)) {
  spec_.validate();
}

Eigen::VectorXd LinearFeatureMap::inter(const AugmentedState& z) const {
  return fourier_features(observe_(z), spec_, &clamps_);
}

Eigen::VectorXd LinearFeatureMap::rad(const AugmentedState& z) const {
  Eigen::VectorXd phi = rad_fn_(z, &clamps_);
  if (static_cast<std::size_t>(phi.size()) != rad_size_) {
    throw validation_error("rad feature function returned the wrong length");
  }
  return phi;
}

}  // namespace saricos
