#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "saricos/harness.hpp"
#include "saricos/heatmap.hpp"

using namespace saricos;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig smoke_config() {
  RunConfig cfg;
  cfg.trials = 2;
  cfg.episodes = 300;
  cfg.eval_episodes = 20;
  cfg.seed = 11;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("saricos_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("trial seeds are distinct and derived from the run seed") {
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  CHECK(trial_seed(1, 0) == trial_seed(1, 0));
  CHECK(evaluation_seed(trial_seed(1, 0)) != trial_seed(1, 0));
}

TEST_CASE("a small run writes verifiable, reproducible artifacts") {
  const RunConfig cfg = smoke_config();
  const fs::path a = scratch("a"), b = scratch("b");
  const RunManifest m = run_training(cfg, Agent::saricos, a);
  run_training(cfg, Agent::saricos, b);

  CHECK(m.mode == "saricos");
  CHECK(m.config_hash == config_hash(cfg));
  REQUIRE(m.trials.size() == 2);
  CHECK(m.trials[0].seed != m.trials[1].seed);
  CHECK(m.trials[0].episodes_run == 300);
  CHECK(m.trials[0].eval.episodes == 20);
  CHECK(verify_manifest(a / "manifest.json").empty());

  for (const char* rel : {"trial_0/checkpoint.json", "trial_0/curve.tsv", "trial_1/checkpoint.json",
                          "trial_1/curve.tsv", "metrics.tsv", "summary.txt", "config.ini"}) {
    INFO(rel);
    CHECK(slurp(a / rel) == slurp(b / rel));
    CHECK(!slurp(a / rel).empty());
  }

  const RunManifest back = read_manifest(a / "manifest.json");
  CHECK(manifest_to_json(back) == manifest_to_json(m));

  // Tampering with any artifact or with the stored config is detected.
  {
    std::ofstream(a / "trial_1/curve.tsv", std::ios::app) << "0\t0\t0\t0\t0\t0\n";
  }
  auto problems = verify_manifest(a / "manifest.json");
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("trial_1/curve.tsv") != std::string::npos);
  {
    std::string text = slurp(b / "config.ini");
    text.replace(text.find("seed = 11"), 9, "seed = 12");
    std::ofstream(b / "config.ini", std::ios::trunc) << text;
  }
  problems = verify_manifest(b / "manifest.json");
  CHECK(problems.size() >= 1);
  fs::remove(b / "trial_0/checkpoint.json");
  CHECK(verify_manifest(b / "manifest.json").size() >= 2);

  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("ER runs are tagged and evaluated in the same metrics") {
  RunConfig cfg = smoke_config();
  cfg.trials = 1;
  const fs::path out = scratch("er");
  const RunManifest m = run_training(cfg, Agent::er, out);
  CHECK(m.mode == "er");
  CHECK(slurp(out / "trial_0/curve.tsv").find("mode=er") != std::string::npos);
  const Checkpoint ckpt = load_checkpoint(out / "trial_0/checkpoint.json");
  CHECK(ckpt.mode == "er");
  // Interchangeable with the risk-aware agent's policy class.
  CHECK_NOTHROW(policy_from_checkpoint(ckpt, cfg));
  fs::remove_all(out);
}

TEST_CASE("evaluation is repeatable and refuses mismatched checkpoints") {
  const RunConfig cfg;
  Checkpoint ckpt = make_checkpoint(cfg, Agent::saricos, initial_policy(cfg).params(), 0, 1);
  for (bool greedy : {false, true}) {
    const auto e1 = evaluate_checkpoint(ckpt, cfg, 30, greedy, 4);
    const auto e2 = evaluate_checkpoint(ckpt, cfg, 30, greedy, 4);
    std::ostringstream t1, t2;
    write_metrics_table(t1, {{"x", summarize({e1.metrics})}});
    write_metrics_table(t2, {{"x", summarize({e2.metrics})}});
    CHECK(t1.str() == t2.str());
  }

  ckpt.params.omega = Eigen::MatrixXd::Zero(3, 4);
  try {
    policy_from_checkpoint(ckpt, cfg);
    FAIL("expected a shape mismatch");
  } catch (const validation_error& e) {
    const std::string what = e.what();
    CHECK(what.find("3x5") != std::string::npos);
    CHECK(what.find("3x4") != std::string::npos);
  }
  ckpt = make_checkpoint(cfg, Agent::saricos, initial_policy(cfg).params(), 0, 1);
  ckpt.inter_spec.order = 2;
  CHECK_THROWS_AS(policy_from_checkpoint(ckpt, cfg), validation_error);
}

TEST_CASE("checkpoints carry their lineage and no wall-clock data") {
  const RunConfig cfg;
  const Checkpoint c = make_checkpoint(cfg, Agent::saricos, initial_policy(cfg).params(), 2, 99);
  CHECK(c.seed_lineage == std::vector<std::uint64_t>{cfg.seed, 2, 99});
  CHECK(c.metadata.at("scenario") == "losing");
  CHECK(serialize_checkpoint(c) == serialize_checkpoint(parse_checkpoint(serialize_checkpoint(c))));
}

TEST_CASE("heatmap grid and clamping") {
  const RunConfig cfg;
  PolicyParams p = initial_policy(cfg).params();
  p.omega(2, 1) = 400.0;  // pushes the dribble mean far outside [0, 150] on one side
  const TwoTieredPolicy policy(p, make_run_feature_map(cfg));

  const auto one = rap_heatmap(policy, cfg.env, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].x == 0.5);
  CHECK(one[0].y == 0.5);

  const auto rows = rap_heatmap(policy, cfg.env, 10);
  CHECK(rows.size() == 100);
  bool saw_high = false, saw_low = false;
  for (const auto& r : rows) {
    CHECK(r.rap_clamped >= 0.0);
    CHECK(r.rap_clamped <= 150.0);
    saw_high = saw_high || r.rap_mean > 150.0;
    saw_low = saw_low || r.rap_mean < 0.0;
  }
  CHECK(saw_high);
  CHECK(saw_low);

  const auto flat = rap_heatmap(initial_policy(cfg), cfg.env, 10);
  const auto means = heatmap_region_means(flat, cfg.env.geometry);
  CHECK(means.halfway == doctest::Approx(110.0));
  CHECK(means.near_goal == doctest::Approx(110.0));
  CHECK(means.halfway_cells == 30);
  CHECK(means.near_goal_cells > 0);

  std::ostringstream os;
  write_heatmap(os, one);
  CHECK(os.str().rfind("# saricos-heatmap schema_version=1\nx\ty\trap_mean\trap_clamped\n", 0) == 0);
}
