#include "saricos/mini_offense.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "saricos/errors.hpp"

namespace saricos::offense {

namespace {

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

Vec2 clamp_to_field(Vec2 p) { return {std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)}; }

// Moves from `from` toward `to` by at most `step`.
Vec2 step_toward(Vec2 from, Vec2 to, double step) {
  const double d = distance(from, to);
  if (d <= step || d == 0.0) return to;
  return from + (step / d) * (to - from);
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.x * ab.x + ab.y * ab.y;
  if (len2 == 0.0) return distance(p, a);
  const double u = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
  return distance(p, a + u * ab);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string to_string(Skill s) {
  switch (s) {
    case Skill::move: return "move";
    case Skill::shoot: return "shoot";
    case Skill::dribble: return "dribble";
  }
  return "?";
}

std::string to_string(Scenario s) { return s == Scenario::winning ? "winning" : "losing"; }

Scenario scenario_from_string(const std::string& s) {
  if (s == "winning") return Scenario::winning;
  if (s == "losing") return Scenario::losing;
  throw config_error("scenario must be 'winning' or 'losing', got '" + s + "'");
}

void Geometry::validate() const {
  if (!(goal_half_width > 0.0) || !(box_radius > 0.0)) throw config_error("goal and box sizes must be positive");
  if (!(striker_speed > 0.0)) throw config_error("striker speed must be positive");
  if (!(keeper_speed_ratio >= 0.0)) throw config_error("keeper speed ratio must be nonnegative");
  if (!(keeper_reaction >= 0.0 && keeper_reaction <= 1.0)) throw config_error("keeper reaction must lie in [0, 1]");
  if (!(reach_radius > 0.0)) throw config_error("reach radius must be positive");
  if (!(rap_max > 0.0) || !(rap_per_step > 0.0)) throw config_error("RAP range must be positive");
  if (!(dribble_max_distance >= 0.0)) throw config_error("dribble distance must be nonnegative");
  if (!(dribble_angle_noise >= 0.0) || !(dribble_power_noise >= 0.0)) throw config_error("noise must be nonnegative");
  if (shoot_steps < 1) throw config_error("a shot takes at least one timestep");
  if (!(shoot_range > 0.0)) throw config_error("shoot range must be positive");
}

std::vector<std::string> RewardTable::violations() const {
  std::vector<std::string> v;
  auto positive = [&](double x, const char* name) {
    if (!(x > 0.0)) v.push_back(std::string(name) + " must be positive");
  };
  auto negative = [&](double x, const char* name) {
    if (!(x < 0.0)) v.push_back(std::string(name) + " must be negative");
  };
  positive(r_move, "r_move");
  positive(r_dribble_far, "r_dribble_far");
  negative(r_dribble_near, "r_dribble_near");
  positive(r_shoot_near, "r_shoot_near");
  negative(r_shoot_far, "r_shoot_far");
  positive(r_score_win, "r_score_win");
  negative(r_score_lose, "r_score_lose");
  positive(goal_reward, "goal_reward");
  positive(near_box_threshold, "near_box_threshold");
  return v;
}

void RewardTable::validate() const {
  const auto v = violations();
  if (!v.empty()) throw config_error("reward table: " + v.front());
}

void OffenseConfig::validate() const {
  geometry.validate();
  rewards.validate();
}

EnvState encode(const FieldState& s) {
  return EnvState{{s.striker.x, s.striker.y, s.ball.x, s.ball.y, s.keeper.x, s.keeper.y,
                   static_cast<double>(s.own_score), static_cast<double>(s.opponent_score),
                   static_cast<double>(static_cast<int>(s.possession))}};
}

FieldState decode(const EnvState& e) {
  if (e.features.size() != kStateDim) throw validation_error("mini-offense state must have 9 entries");
  const auto& f = e.features;
  FieldState s;
  s.striker = {f[0], f[1]};
  s.ball = {f[2], f[3]};
  s.keeper = {f[4], f[5]};
  s.own_score = static_cast<int>(f[6]);
  s.opponent_score = static_cast<int>(f[7]);
  s.possession = static_cast<Possession>(static_cast<int>(f[8]));
  return s;
}

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double goal_distance(const Geometry& g, Vec2 p) { return distance(p, g.goal_center); }

bool in_bounds(const FieldState& s) {
  auto inside = [](Vec2 p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; };
  return inside(s.striker) && inside(s.ball) && inside(s.keeper);
}

FieldState scenario_init(Scenario kind, const Geometry& g, rng_t& rng) {
  std::uniform_real_distribution<double> jx(-g.start_jitter_x, g.start_jitter_x);
  std::uniform_real_distribution<double> jy(-g.start_jitter_y, g.start_jitter_y);
  FieldState s;
  s.striker = clamp_to_field({g.start_x + jx(rng), g.goal_center.y + jy(rng)});
  s.ball = s.striker;
  s.keeper = {g.keeper_line_x, g.goal_center.y};
  s.possession = Possession::striker;
  if (kind == Scenario::winning) {
    s.own_score = 1;
    s.opponent_score = 0;
  } else {
    s.own_score = 0;
    s.opponent_score = 1;
  }
  return s;
}

Vec2 keeper_policy(const FieldState& s, const Geometry& g, rng_t& rng) {
  const double speed = g.keeper_speed();
  if (s.possession == Possession::loose && goal_distance(g, s.ball) < g.rush_radius &&
      std::bernoulli_distribution(g.keeper_reaction)(rng))
    return clamp_to_field(step_toward(s.keeper, s.ball, speed));
  const Vec2 post{g.keeper_line_x, std::clamp(s.ball.y, g.goal_center.y - g.patrol_half_width,
                                              g.goal_center.y + g.patrol_half_width)};
  return clamp_to_field(step_toward(s.keeper, post, speed));
}

bool keeper_captures(const FieldState& s, const Geometry& g) { return distance(s.keeper, s.ball) < g.reach_radius; }

Vec2 shot_aim(const FieldState& s, const Geometry& g) {
  // Aim inside the post on the side away from the keeper.
  const double offset = 0.6 * g.goal_half_width;
  const double y = s.keeper.y > g.goal_center.y ? g.goal_center.y - offset : g.goal_center.y + offset;
  return {g.goal_center.x, y};
}

double keeper_margin(const FieldState& s, const Geometry& g) {
  return segment_distance(s.keeper, s.ball, shot_aim(s, g));
}

double goal_probability(const FieldState& s, const Geometry& g) {
  const double d = goal_distance(g, s.ball);
  const double margin = std::min(keeper_margin(s, g), g.shot_margin_cap);
  return logistic(g.shot_bias - g.shot_distance_weight * d + g.shot_margin_weight * margin);
}

double shaped_reward(const FieldState& start, Skill skill, const SkillOutcome& outcome, const OffenseConfig& cfg) {
  (void)start;
  (void)skill;
  const RewardTable& r = cfg.rewards;
  double total = outcome.steps * r.score_reward(cfg.scenario);
  switch (outcome.executed) {
    case Skill::move:
      total += outcome.steps * r.r_move;
      break;
    case Skill::dribble:
      if (outcome.kicked) {
        if (outcome.near_box) total += r.r_dribble_near;
        else if (outcome.advanced) total += r.r_dribble_far;
      }
      break;
    case Skill::shoot:
      if (outcome.kicked) total += outcome.near_box ? r.r_shoot_near : r.r_shoot_far;
      if (outcome.goal) total += r.goal_reward;
      break;
  }
  return total;
}

SkillOutcome skill_execute(const FieldState& state, Skill skill, double rap, int max_steps,
                           const OffenseConfig& cfg, rng_t& rng) {
  if (max_steps < 1) throw contract_error("skill_execute needs a positive step budget");
  const Geometry& g = cfg.geometry;
  const RewardTable& r = cfg.rewards;
  const double score = r.score_reward(cfg.scenario);

  SkillOutcome out;
  out.next = state;
  FieldState& s = out.next;
  out.near_box = goal_distance(g, state.striker) < r.near_box_threshold;

  const bool can_play = distance(state.striker, state.ball) <= g.reach_radius;
  const bool in_range = goal_distance(g, state.ball) <= g.shoot_range;
  out.executed = skill;
  if ((skill != Skill::move && !can_play) || (skill == Skill::shoot && !in_range)) {
    out.executed = Skill::move;
    out.fallback = true;
  }

  // Keeper moves after the striker's action each timestep; returns true on capture.
  auto keeper_turn = [&]() {
    s.keeper = keeper_policy(s, g, rng);
    if (keeper_captures(s, g)) {
      s.possession = Possession::keeper;
      s.ball = s.keeper;
      out.capture = true;
    }
    return out.capture;
  };

  switch (out.executed) {
    case Skill::move: {
      out.steps = 1;
      s.striker = step_toward(s.striker, s.ball, g.striker_speed);
      if (distance(s.striker, s.ball) <= g.reach_radius) s.possession = Possession::striker;
      out.step_rewards.push_back(r.r_move + score);
      keeper_turn();
      break;
    }
    case Skill::dribble: {
      const double power = std::clamp(rap, 0.0, g.rap_max);
      const int duration = static_cast<int>(std::ceil(power / g.rap_per_step)) + 1;
      out.steps = std::min(duration, max_steps);

      std::normal_distribution<double> noise(0.0, 1.0);
      const double angle_noise = g.dribble_angle_noise * noise(rng);
      const double power_noise = std::max(0.0, 1.0 + g.dribble_power_noise * noise(rng));
      const Vec2 start = s.striker;
      const Vec2 to_goal = g.goal_center - start;
      const double base_angle = std::atan2(to_goal.y, to_goal.x) + angle_noise;
      const double length = g.dribble_max_distance * (power / g.rap_max) * power_noise;
      Vec2 target = clamp_to_field({start.x + length * std::cos(base_angle), start.y + length * std::sin(base_angle)});
      target.x = std::min(target.x, g.goal_center.x - 0.01);
      out.ball_displacement = distance(start, target);
      out.advanced = out.ball_displacement >= g.min_dribble_advance;
      out.kicked = true;

      // Ball rolls to the target over the first duration-1 steps; the striker
      // arrives on it at the last step.
      const int roll = std::max(1, duration - 1);
      for (int i = 1; i <= out.steps; ++i) {
        const double ball_frac = std::min(1.0, static_cast<double>(i) / roll);
        const double striker_frac = static_cast<double>(i) / duration;
        s.ball = start + ball_frac * (target - start);
        s.striker = start + striker_frac * (target - start);
        s.possession = distance(s.striker, s.ball) <= 1e-12 ? Possession::striker : Possession::loose;
        double rew = score;
        if (i == 1) rew += out.near_box ? r.r_dribble_near : (out.advanced ? r.r_dribble_far : 0.0);
        out.step_rewards.push_back(rew);
        if (keeper_turn()) {
          out.steps = i;
          break;
        }
      }
      break;
    }
    case Skill::shoot: {
      out.steps = std::min(g.shoot_steps, max_steps);
      out.kicked = true;
      const double p_goal = goal_probability(s, g);
      const Vec2 aim = shot_aim(s, g);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const bool scores = unif(rng) < p_goal;
      const bool completes = out.steps == g.shoot_steps;
      for (int i = 1; i <= out.steps; ++i) {
        double rew = score;
        if (i == 1) rew += out.near_box ? r.r_shoot_near : r.r_shoot_far;
        if (i == out.steps && completes && scores) rew += r.goal_reward;
        out.step_rewards.push_back(rew);
      }
      s.possession = Possession::loose;
      if (completes) {
        if (scores) {
          s.ball = aim;
          out.goal = true;
        } else {
          s.ball = s.keeper;
          s.possession = Possession::keeper;
          out.capture = true;
        }
      } else {
        s.ball = clamp_to_field(s.ball + 0.5 * (aim - s.ball));
      }
      break;
    }
  }
  return out;
}

MiniOffenseEnv::MiniOffenseEnv(OffenseConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  rng_t rng(0);
  state_ = scenario_init(cfg_.scenario, cfg_.geometry, rng);
}

EnvState MiniOffenseEnv::reset(rng_t& rng) {
  state_ = scenario_init(cfg_.scenario, cfg_.geometry, rng);
  return encode(state_);
}

SkillResult MiniOffenseEnv::execute(std::size_t skill, double rap, int max_steps, rng_t& rng) {
  if (skill >= kNumSkills) throw validation_error("mini-offense skill index out of range");
  const SkillOutcome out = skill_execute(state_, static_cast<Skill>(skill), rap, max_steps, cfg_, rng);
  if (out.fallback) ++fallbacks_;
  state_ = out.next;

  SkillResult res;
  res.steps = out.steps;
  res.step_rewards = out.step_rewards;
  res.next = encode(state_);
  res.fallback = out.fallback;
  if (out.goal) {
    res.terminated = true;
    res.event = kGoal;
  } else if (out.capture) {
    res.terminated = true;
    res.event = kCapture;
  }
  return res;
}

std::optional<Vec2> OffenseRadAdapter::agent_position(const EnvState& s) const {
  if (s.features.size() != kStateDim) return std::nullopt;
  return Vec2{s.features[0], s.features[1]};
}

std::vector<double> inter_observation(const AugmentedState& z, int horizon) {
  const FieldState s = decode(z.env);
  return {s.striker.x, s.striker.y, z.w, static_cast<double>(z.t) / horizon, distance(s.keeper, s.ball)};
}

FeatureSpec default_inter_spec() {
  FeatureSpec spec;
  spec.kind = FeatureKind::fourier;
  spec.order = 3;
  spec.coupled = false;
  spec.bounds = {{0.0, 1.0}, {0.0, 1.0}, {-1.0, 2.0}, {0.0, 1.0}, {0.0, 1.2}};
  return spec;
}

std::shared_ptr<FeatureMap> make_feature_map(const OffenseConfig& cfg, int horizon, FeatureSpec inter_spec) {
  if (inter_spec.dims() != 5) throw config_error("mini-offense inter-skill features need 5 bounds");
  auto adapter = std::make_shared<OffenseRadAdapter>(cfg.geometry);
  auto observe = [horizon](const AugmentedState& z) { return inter_observation(z, horizon); };
  auto rad = [adapter](const AugmentedState& z, ClampCounter* c) { return rad_features(z, adapter.get(), c); };
  return std::make_shared<LinearFeatureMap>(std::move(inter_spec), observe, kRadFeatureCount, rad, "offense5");
}

PolicyParams initial_params(const FeatureMap& fm, double initial_rap, double variance, double rap_max) {
  PolicyParams p;
  p.alpha = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kNumSkills), static_cast<Eigen::Index>(fm.inter_size()));
  p.omega = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kNumSkills), static_cast<Eigen::Index>(fm.rad_size()));
  p.omega.col(0).setConstant(initial_rap);
  p.variance = variance;
  p.clamp = {0.0, rap_max};
  return p;
}

}  // namespace saricos::offense
