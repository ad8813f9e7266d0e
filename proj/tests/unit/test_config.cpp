#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "saricos/config.hpp"

using namespace saricos;
namespace fs = std::filesystem;

TEST_CASE("defaults validate and describe the standard protocol") {
  const RunConfig cfg;
  CHECK(validate_config(cfg).empty());
  CHECK(cfg.trials == 3);
  CHECK(cfg.episodes == 20000);
  CHECK(cfg.eval_episodes == 100);
  CHECK(cfg.episode.horizon == 150);
  CHECK(cfg.episode.beta == 1.0);
  CHECK(cfg.inter_spec().feature_count() == 16);
}

TEST_CASE("parse_config overrides defaults section by section") {
  const auto cfg = parse_config(
      "[run]\nseed = 42\ntrials = 1\n"
      "[learner]\nepisodes = 500\nestimator = baseline\nearly_stop = true\n"
      "[env]\nscenario = winning\nkeeper_speed_ratio = 0.5\n"
      "[rewards]\ngoal_reward = 3\n");
  CHECK(cfg.seed == 42);
  CHECK(cfg.trials == 1);
  CHECK(cfg.episodes == 500);
  CHECK(cfg.estimator == Estimator::baseline);
  CHECK(cfg.early_stop);
  CHECK(cfg.env.scenario == offense::Scenario::winning);
  CHECK(cfg.env.geometry.keeper_speed_ratio == 0.5);
  CHECK(cfg.env.rewards.goal_reward == 3.0);
  CHECK(cfg.batch_size == 30);
}

TEST_CASE("every problem is reported at once") {
  try {
    parse_config(
        "[learner]\nepisodez = 10\nbatch_size = many\np_a = 0.4\n"
        "[rewards]\nr_dribble_near = 0.5\n[bogus]\nx = 1\n");
    FAIL("expected invalid_config");
  } catch (const invalid_config& e) {
    const auto& issues = e.issues();
    CHECK(issues.size() >= 5);
    const std::string what = e.what();
    CHECK(what.find("episodez") != std::string::npos);
    CHECK(what.find("batch_size") != std::string::npos);
    CHECK(what.find("bogus") != std::string::npos);
    CHECK(what.find("r_dribble_near") != std::string::npos);
    CHECK(what.find("p_a") != std::string::npos);
  }
}

TEST_CASE("schedule and box problems are configuration errors") {
  RunConfig cfg;
  cfg.b0 = 0.5;  // b0 < a0
  CHECK(!validate_config(cfg).empty());
  cfg = RunConfig{};
  cfg.alpha_bound = -1.0;
  CHECK(!validate_config(cfg).empty());
  cfg = RunConfig{};
  cfg.p_b = 1.2;
  CHECK(!validate_config(cfg).empty());
}

TEST_CASE("canonical text round-trips and hashes stably") {
  RunConfig cfg;
  cfg.seed = 7;
  cfg.a0 = 0.1;
  cfg.env.geometry.shot_bias = 2.7000000000000002;
  const std::string text = canonical_config(cfg);
  const RunConfig back = parse_config(text);
  CHECK(canonical_config(back) == text);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 64);
  cfg.seed = 8;
  CHECK(config_hash(cfg) != config_hash(back));
  CHECK(text.rfind("; saricos-config schema_version=1", 0) == 0);
}

TEST_CASE("sha256 of known inputs") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("files: missing is an I/O error, invalid is a config error") {
  const fs::path dir = fs::temp_directory_path() / "saricos_config_test";
  fs::create_directories(dir);
  CHECK_THROWS_AS(load_config(dir / "absent.ini"), io_error);
  {
    std::ofstream(dir / "bad.ini") << "[learner]\nbatch_size = 0\n";
  }
  CHECK_THROWS_AS(load_config(dir / "bad.ini"), invalid_config);
  {
    std::ofstream(dir / "good.ini") << canonical_config(RunConfig{});
  }
  CHECK(config_hash(load_config(dir / "good.ini")) == config_hash(RunConfig{}));
  fs::remove_all(dir);
}

TEST_CASE("set_config_value applies single overrides") {
  RunConfig cfg;
  set_config_value(cfg, "learner", "episodes", "500");
  set_config_value(cfg, "env", "scenario", "winning");
  set_config_value(cfg, "eval", "greedy", "true");
  CHECK(cfg.episodes == 500);
  CHECK(cfg.env.scenario == offense::Scenario::winning);
  CHECK(cfg.eval_greedy);
  CHECK_THROWS_AS(set_config_value(cfg, "learner", "nope", "1"), invalid_config);
  CHECK_THROWS_AS(set_config_value(cfg, "run", "trials", "three"), invalid_config);
}
