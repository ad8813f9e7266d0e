#include <doctest.h>

#include <sstream>

#include "saricos/errors.hpp"
#include "saricos/policy.hpp"
#include "saricos/smdp.hpp"
#include "saricos/tiny_mdp.hpp"
#include "saricos/trajectory_io.hpp"
#include "support/test_envs.hpp"

using namespace saricos;
using saricos::testing::ConstantEnv;
using saricos::testing::FixedSkill;

TEST_CASE("augment_transition accumulates undiscounted skill reward") {
  const EnvState x{{0.0}};
  CHECK(augment_transition({x, 0.0, 0}, 0.5, x).w == doctest::Approx(0.5));
  CHECK(augment_transition({x, 0.5, 10}, 0.0, x).w == doctest::Approx(0.5));
  const auto z = augment_transition({x, 0.9, 149}, 0.2, x);
  CHECK(z.w == doctest::Approx(1.1));
  CHECK(z.t == 150);
  CHECK(augment_transition({x, 0.0, 3}, 1.0, x, 4).t == 7);
}

TEST_CASE("augment_transition rejects non-finite rewards") {
  const EnvState x{{0.0}};
  CHECK_THROWS_AS(augment_transition({x, 0.0, 0}, std::numeric_limits<double>::quiet_NaN(), x), validation_error);
  CHECK_THROWS_AS(augment_transition({x, 0.0, 0}, std::numeric_limits<double>::infinity(), x), validation_error);
}

TEST_CASE("augmented_reward is the terminal indicator of w >= beta") {
  CHECK(augmented_reward(5, 150, 0.4, 1.0) == 0.0);
  CHECK(augmented_reward(150, 150, 1.2, 1.0) == 1.0);
  CHECK(augmented_reward(150, 150, 1.0, 1.0) == 1.0);
  CHECK(augmented_reward(150, 150, 0.999, 1.0) == 0.0);
  CHECK(augmented_reward(149, 150, 5.0, 1.0) == 0.0);
  CHECK_THROWS_AS(augmented_reward(151, 150, 1.0, 1.0), contract_error);
  CHECK_THROWS_AS(augmented_reward(-1, 150, 1.0, 1.0), contract_error);
}

TEST_CASE("EpisodeConfig validation") {
  EpisodeConfig c;
  CHECK_NOTHROW(c.validate());
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(), validation_error);
  c.horizon = 10;
  c.gamma = 1.5;
  CHECK_THROWS_AS(c.validate(), validation_error);
}

TEST_CASE("constant reward 0.01 over 150 steps crosses beta = 1 but not beta = 2") {
  ConstantEnv env(0.01);
  FixedSkill policy(0);
  EpisodeConfig cfg;
  cfg.horizon = 150;
  rng_t rng(1);

  cfg.beta = 1.0;
  auto traj = run_episode(env, policy, cfg, rng);
  CHECK(traj.final_w() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(traj.steps.size() == 150);
  CHECK(traj.steps.back().aug_reward == 1.0);
  CHECK(traj.augmented_return() == 1.0);

  cfg.beta = 2.0;
  traj = run_episode(env, policy, cfg, rng);
  CHECK(traj.steps.back().aug_reward == 0.0);
  CHECK(traj.augmented_return() == 0.0);
}

TEST_CASE("trajectory structure: chaining, horizon, reward range, accumulation") {
  auto fx = TinyMdpFixture::two_state();
  TinyMdpEnv env(fx);
  auto fm = tiny_feature_map(fx);
  PolicyParams p = tiny_zero_params(*fm, fx.num_skills, 1.0);
  p.alpha(0, 0) = 0.3;
  p.omega(1, 1) = -0.4;
  TwoTieredPolicy policy(p, fm);
  EpisodeConfig cfg;
  cfg.horizon = fx.horizon;
  cfg.beta = 0.6;

  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto rng = derive_rng(seed);
    const auto traj = run_episode(env, policy, cfg, rng);
    REQUIRE(!traj.steps.empty());
    CHECK(traj.steps.size() <= static_cast<std::size_t>(cfg.horizon));
    double base = 0.0;
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
      const auto& s = traj.steps[i];
      if (i + 1 < traj.steps.size()) CHECK(s.z_next == traj.steps[i + 1].z);
      CHECK(s.z_next.t >= s.z.t);
      CHECK((s.aug_reward == 0.0 || s.aug_reward == 1.0));
      if (s.z_next.t < cfg.horizon) CHECK(s.aug_reward == 0.0);
      base += s.base_reward;
    }
    CHECK(std::abs(traj.final_w() - traj.steps.front().z.w - base) <= 1e-12);
    CHECK(traj.steps.back().z_next.t == cfg.horizon);
    const double ret = traj.augmented_return();
    CHECK((ret == 0.0 || ret == 1.0));
  }
}

namespace {

// Absorbs after two timesteps.
class ShortEnv : public Environment {
 public:
  std::size_t state_dim() const override { return 1; }
  std::size_t num_skills() const override { return 1; }
  EnvState reset(rng_t&) override {
    t_ = 0;
    return EnvState{{0.0}};
  }
  SkillResult execute(std::size_t, double, int, rng_t&) override {
    SkillResult r;
    r.steps = 1;
    r.step_rewards = {0.6};
    r.next = EnvState{{1.0}};
    r.terminated = ++t_ == 2;
    r.event = r.terminated ? 7 : 0;
    return r;
  }

 private:
  int t_ = 0;
};

}  // namespace

TEST_CASE("an early absorbing state jumps the clock to T and the indicator is evaluated there") {
  ShortEnv env;
  FixedSkill policy(0);
  EpisodeConfig cfg;
  cfg.horizon = 150;
  cfg.beta = 1.0;
  rng_t rng(3);
  const auto traj = run_episode(env, policy, cfg, rng);
  REQUIRE(traj.steps.size() == 2);
  CHECK(traj.env_length == 2);
  CHECK(traj.event == 7);
  CHECK(traj.steps.back().z_next.t == 150);
  CHECK(traj.final_w() == doctest::Approx(1.2));
  CHECK(traj.steps.back().aug_reward == 1.0);
}

TEST_CASE("rollouts are deterministic under a fixed seed") {
  auto fx = TinyMdpFixture::two_state();
  TinyMdpEnv env(fx);
  auto fm = tiny_feature_map(fx);
  TwoTieredPolicy policy(tiny_zero_params(*fm, fx.num_skills, 1.0), fm);
  EpisodeConfig cfg;
  cfg.horizon = fx.horizon;
  auto r1 = derive_rng(42, {1, 2});
  auto r2 = derive_rng(42, {1, 2});
  const auto a = run_episode(env, policy, cfg, r1);
  const auto b = run_episode(env, policy, cfg, r2);
  std::ostringstream sa, sb;
  write_trajectory(sa, a, true);
  write_trajectory(sb, b, true);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("success probability counts trajectories reaching beta") {
  std::vector<RiskAwareTrajectory> batch(10);
  for (int i = 0; i < 10; ++i) {
    TrajectoryStep s;
    s.z_next.w = i < 7 ? 1.0 + 0.1 * i : 0.5;
    s.z_next.t = 150;
    s.aug_reward = augmented_reward(150, 150, s.z_next.w, 1.0);
    s.reward = s.aug_reward;
    batch[static_cast<std::size_t>(i)].steps.push_back(s);
  }
  CHECK(success_probability_estimate(batch, 1.0) == doctest::Approx(0.7));
  CHECK(success_probability_estimate(batch, 0.1) == 1.0);
}

TEST_CASE("success probability equals the mean augmented return bitwise") {
  auto fx = TinyMdpFixture::two_state();
  TinyMdpEnv env(fx);
  auto fm = tiny_feature_map(fx);
  PolicyParams p = tiny_zero_params(*fm, fx.num_skills, 1.0);
  p.alpha(1, 0) = 0.5;
  TwoTieredPolicy policy(p, fm);
  EpisodeConfig cfg;
  cfg.horizon = fx.horizon;
  cfg.beta = 0.6;
  std::vector<RiskAwareTrajectory> batch;
  for (std::uint64_t e = 0; e < 100; ++e) {
    auto rng = derive_rng(9, {e});
    batch.push_back(run_episode(env, policy, cfg, rng));
  }
  const double freq = success_probability_estimate(batch, cfg.beta);
  const double mean = mean_augmented_return(batch);
  CHECK(freq == mean);
  CHECK(freq > 0.0);
  CHECK(freq < 1.0);
}

TEST_CASE("trajectory dump round-trips") {
  ConstantEnv env(0.25, 1, 2);
  FixedSkill policy(0, 12.5);
  EpisodeConfig cfg;
  cfg.horizon = 6;
  rng_t rng(0);
  const auto traj = run_episode(env, policy, cfg, rng);
  std::stringstream io;
  write_trajectory(io, traj, true);
  const auto lines = read_trajectory(io);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].t == 0);
  CHECK(lines[2].t == 4);
  CHECK(lines[1].steps == 2);
  CHECK(lines[2].w == doctest::Approx(1.5));
  CHECK(lines[0].rap == 12.5);
  CHECK(lines[0].state == std::vector<double>{0.0});
}
