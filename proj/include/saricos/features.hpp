#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "saricos/smdp.hpp"

namespace saricos {

struct Bounds {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Bounds&) const = default;
};

enum class FeatureKind { fourier, raw };

// Feature layout for a state vector whose i-th entry is normalised by bounds[i].
//   fourier, decoupled: [1, cos(pi*k*s_i) for each dim i, k = 1..order]      -> 1 + order*dims
//   fourier, coupled:   cos(pi*<c, s>) for all c in {0..order}^dims, c = 0 first -> (order+1)^dims
//   raw:                [1, s_1, ..., s_dims]                                   -> 1 + dims
struct FeatureSpec {
  FeatureKind kind = FeatureKind::fourier;
  int order = 3;
  bool coupled = false;
  std::vector<Bounds> bounds;

  std::size_t dims() const { return bounds.size(); }
  std::size_t feature_count() const;
  void validate() const;
  bool operator==(const FeatureSpec&) const = default;
};

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);

// Counts state entries that fell outside their declared bounds and were clamped.
class ClampCounter {
 public:
  void add(std::uint64_t n = 1) { count_.fetch_add(n, std::memory_order_relaxed); }
  std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }
  void reset() { count_.store(0, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

// Maps each entry into [0, 1]; out-of-range entries are clamped and counted.
Eigen::VectorXd normalize_state(std::span<const double> s, const std::vector<Bounds>& bounds,
                                ClampCounter* counter = nullptr);

Eigen::VectorXd fourier_features(std::span<const double> s, const FeatureSpec& spec,
                                 ClampCounter* counter = nullptr);

// Uses [env features..., w, t] as the state vector.
Eigen::VectorXd fourier_features(const AugmentedState& z, const FeatureSpec& spec,
                                 ClampCounter* counter = nullptr);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// What an environment must expose for the risk-aware distribution features.
class RadAdapter {
 public:
  virtual ~RadAdapter() = default;
  virtual std::optional<Vec2> agent_position(const EnvState& s) const = 0;
  virtual std::optional<Vec2> goal_position() const = 0;
  virtual Bounds x_bounds() const { return {0.0, 1.0}; }
  virtual Bounds y_bounds() const { return {0.0, 1.0}; }
  virtual Bounds w_bounds() const = 0;
  virtual Bounds distance_bounds() const = 0;
};

inline constexpr std::size_t kRadFeatureCount = 5;

// [1, x_agent, y_agent, w, distGoal] in the environment's own units.
// Throws config_error when the adapter is missing or lacks a capability.
Eigen::VectorXd rad_raw_features(const AugmentedState& z, const RadAdapter* adapter);

// rad_raw_features with the last four entries mapped from their bounds onto [-1, 1].
Eigen::VectorXd rad_features(const AugmentedState& z, const RadAdapter* adapter,
                             ClampCounter* counter = nullptr);

// Feature vectors for the two policy tiers (and the critic, which reuses the
// inter-skill features).
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual std::size_t inter_size() const = 0;
  virtual std::size_t rad_size() const = 0;
  virtual Eigen::VectorXd inter(const AugmentedState& z) const = 0;
  virtual Eigen::VectorXd rad(const AugmentedState& z) const = 0;
  virtual const FeatureSpec& inter_spec() const = 0;
  virtual std::string rad_kind() const = 0;
};

// Inter-skill features from a FeatureSpec over an observation of z; RAD
// features from a caller-supplied function.
class LinearFeatureMap : public FeatureMap {
 public:
  using observer = std::function<std::vector<double>(const AugmentedState&)>;
  using rad_function = std::function<Eigen::VectorXd(const AugmentedState&, ClampCounter*)>;

  LinearFeatureMap(FeatureSpec inter_spec, observer inter_obs, std::size_t rad_size,
                   rad_function rad_fn, std::string rad_kind);

  std::size_t inter_size() const override { return inter_size_; }
  std::size_t rad_size() const override { return rad_size_; }
  Eigen::VectorXd inter(const AugmentedState& z) const override;
  Eigen::VectorXd rad(const AugmentedState& z) const override;
  const FeatureSpec& inter_spec() const override { return spec_; }
  std::string rad_kind() const override { return rad_kind_; }

  std::uint64_t clamped() const { return clamps_.count(); }

 private:
  FeatureSpec spec_;
  observer observe_;
  std::size_t inter_size_;
  std::size_t rad_size_;
  rad_function rad_fn_;
  std::string rad_kind_;
  mutable ClampCounter clamps_;
};

}  // namespace saricos
