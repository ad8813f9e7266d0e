#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "saricos/features.hpp"
#include "saricos/policy.hpp"
#include "saricos/smdp.hpp"

namespace saricos::offense {

// Half field [0,1] x [0,1]; x = 0 is the halfway line, the goal mouth is centred on (1, 0.5).

enum class Skill : std::size_t { move = 0, shoot = 1, dribble = 2 };
inline constexpr std::size_t kNumSkills = 3;
std::string to_string(Skill s);

enum class Possession { striker = 0, keeper = 1, loose = 2 };

enum class Scenario { winning, losing };
std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Terminal events reported through SkillResult::event.
enum Event : int { kNoEvent = 0, kGoal = 1, kCapture = 2 };

struct Geometry {
  Vec2 goal_center{1.0, 0.5};
  double goal_half_width = 0.1;
  double box_radius = 0.25;           // "near" region: distance to goal centre below this

  double striker_speed = 0.04;        // field units per timestep
  double keeper_speed_ratio = 0.6;
  double reach_radius = 0.05;         // keeper captures inside this radius; striker can play the ball inside it
  double keeper_line_x = 0.97;
  double patrol_half_width = 0.1;     // patrol segment y in goal_center.y +- this
  double rush_radius = 0.35;          // keeper leaves the line when a loose ball is this close to goal
  double keeper_reaction = 0.5;       // per-step probability the keeper rushes a loose ball

  double rap_max = 150.0;
  double rap_per_step = 30.0;         // dribble lasts ceil(rap / rap_per_step) + 1 timesteps
  double dribble_max_distance = 0.07; // ball displacement at rap_max
  double dribble_angle_noise = 0.1;   // radians, std dev
  double dribble_power_noise = 0.1;   // relative std dev of the displacement
  double min_dribble_advance = 0.02;  // shorter dribbles earn no far-dribble reward

  int shoot_steps = 2;
  double shoot_range = 0.5;           // Shoot is initiable only within this distance of the goal centre
  // P(goal) = logistic(shot_bias - shot_distance_weight * d + shot_margin_weight * min(margin, cap))
  // with d the ball's distance to the goal centre and margin the keeper's distance from the shot line.
  double shot_bias = 2.7;
  double shot_distance_weight = 17.0;
  double shot_margin_weight = 15.0;
  double shot_margin_cap = 0.2;

  double start_x = 0.05;
  double start_jitter_x = 0.02;
  double start_jitter_y = 0.05;

  double keeper_speed() const { return keeper_speed_ratio * striker_speed; }
  void validate() const;
};

struct RewardTable {
  double r_move = 0.008;
  double r_dribble_far = 0.02;
  double r_dribble_near = -0.02;
  double r_shoot_near = 0.05;
  double r_shoot_far = -0.05;
  double r_score_win = 0.004;
  double r_score_lose = -0.004;
  double goal_reward = 2.5;
  double near_box_threshold = 0.25;

  // Sign constraints: r_dribble_far, r_shoot_near, r_move, r_score_win, goal_reward > 0;
  // r_dribble_near, r_shoot_far, r_score_lose < 0; threshold > 0.
  std::vector<std::string> violations() const;
  void validate() const;
  double score_reward(Scenario s) const { return s == Scenario::winning ? r_score_win : r_score_lose; }
};

struct OffenseConfig {
  Geometry geometry;
  RewardTable rewards;
  Scenario scenario = Scenario::losing;
  void validate() const;
};

struct FieldState {
  Vec2 striker;
  Vec2 ball;
  Vec2 keeper;
  int own_score = 0;
  int opponent_score = 0;
  Possession possession = Possession::striker;
};

inline constexpr std::size_t kStateDim = 9;
// [striker x, striker y, ball x, ball y, keeper x, keeper y, own score, opponent score, possession]
EnvState encode(const FieldState& s);
FieldState decode(const EnvState& e);

double distance(Vec2 a, Vec2 b);
double goal_distance(const Geometry& g, Vec2 p);
bool in_bounds(const FieldState& s);

FieldState scenario_init(Scenario kind, const Geometry& g, rng_t& rng);

// Keeper position after one timestep. It shadows the ball's y on its patrol
// segment and, while the ball is loose within rush_radius, runs at it with
// probability keeper_reaction per timestep.
Vec2 keeper_policy(const FieldState& s, const Geometry& g, rng_t& rng);

bool keeper_captures(const FieldState& s, const Geometry& g);

// Keeper's distance from the segment between the ball and the aim point, and the aim point itself.
Vec2 shot_aim(const FieldState& s, const Geometry& g);
double keeper_margin(const FieldState& s, const Geometry& g);
double goal_probability(const FieldState& s, const Geometry& g);

// Facts about one skill execution that determine its shaped reward.
struct SkillOutcome {
  Skill executed = Skill::move;   // after any fallback
  bool fallback = false;
  bool near_box = false;          // striker inside the near region when the skill started
  bool advanced = false;          // dribble moved the ball at least min_dribble_advance
  bool kicked = false;            // shot/dribble kick happened within the step budget
  bool goal = false;
  bool capture = false;
  int steps = 0;
  double ball_displacement = 0.0;
  std::vector<double> step_rewards;
  FieldState next;
};

// Total shaped reward for an outcome: skill/region entry plus r_score per timestep.
double shaped_reward(const FieldState& start, Skill skill, const SkillOutcome& outcome, const OffenseConfig& cfg);

// Runs a skill for at most max_steps timesteps.
SkillOutcome skill_execute(const FieldState& state, Skill skill, double rap, int max_steps,
                           const OffenseConfig& cfg, rng_t& rng);

class MiniOffenseEnv : public Environment {
 public:
  explicit MiniOffenseEnv(OffenseConfig cfg);

  std::size_t state_dim() const override { return kStateDim; }
  std::size_t num_skills() const override { return kNumSkills; }
  EnvState reset(rng_t& rng) override;
  SkillResult execute(std::size_t skill, double rap, int max_steps, rng_t& rng) override;

  const OffenseConfig& config() const { return cfg_; }
  const FieldState& state() const { return state_; }
  std::uint64_t fallbacks() const { return fallbacks_; }

 private:
  OffenseConfig cfg_;
  FieldState state_;
  std::uint64_t fallbacks_ = 0;
};

class OffenseRadAdapter : public RadAdapter {
 public:
  explicit OffenseRadAdapter(Geometry g) : g_(g) {}
  std::optional<Vec2> agent_position(const EnvState& s) const override;
  std::optional<Vec2> goal_position() const override { return g_.goal_center; }
  Bounds w_bounds() const override { return {-1.0, 2.0}; }
  Bounds distance_bounds() const override { return {0.0, 1.2}; }

 private:
  Geometry g_;
};

// Inter-skill observation [striker x, striker y, w, t / T, keeper-ball distance].
std::vector<double> inter_observation(const AugmentedState& z, int horizon);
FeatureSpec default_inter_spec();

// Fourier inter-skill features over inter_observation plus the five RAD features.
std::shared_ptr<FeatureMap> make_feature_map(const OffenseConfig& cfg, int horizon,
                                             FeatureSpec inter_spec = default_inter_spec());

// Uniform skill choice; every RAD has mean initial_rap and variance V.
PolicyParams initial_params(const FeatureMap& fm, double initial_rap = 110.0, double variance = 100.0,
                            double rap_max = 150.0);

}  // namespace saricos::offense
