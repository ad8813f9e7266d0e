// Command-line front end: train / er-train / eval / gradcheck / heatmap / show-config / verify.
//
// Exit status: 0 success, 1 usage error, 2 invalid config or input,
// 3 file I/O failure, 4 failed check, 5 training or simulation failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "saricos/checkpoint.hpp"
#include "saricos/config.hpp"
#include "saricos/errors.hpp"
#include "saricos/gradcheck.hpp"
#include "saricos/harness.hpp"
#include "saricos/heatmap.hpp"
#include "saricos/metrics.hpp"

namespace fs = std::filesystem;
using namespace saricos;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kInvalid = 2, kIo = 3, kCheckFailed = 4, kRunFailed = 5 };

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<long> episodes;
  std::string scenario;
  std::string out;
  std::string checkpoint;
  std::string manifest;
  std::optional<int> eval_episodes;
  int resolution = 20;
  bool greedy = false;
  std::string inject_fault;
};

RunConfig base_config(const Options& o) { return o.config.empty() ? RunConfig{} : load_config(o.config); }

void apply_overrides(RunConfig& cfg, const Options& o) {
  if (o.seed) set_config_value(cfg, "run", "seed", std::to_string(*o.seed));
  if (o.trials) set_config_value(cfg, "run", "trials", std::to_string(*o.trials));
  if (o.episodes) set_config_value(cfg, "learner", "episodes", std::to_string(*o.episodes));
  if (!o.scenario.empty()) set_config_value(cfg, "env", "scenario", o.scenario);
  if (o.eval_episodes) set_config_value(cfg, "eval", "episodes", std::to_string(*o.eval_episodes));
  if (o.greedy) cfg.eval_greedy = true;
  if (auto issues = validate_config(cfg); !issues.empty()) throw invalid_config(std::move(issues));
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw io_error("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << text;
}

int cmd_train(const Options& o, Agent agent) {
  RunConfig cfg = base_config(o);
  apply_overrides(cfg, o);
  const fs::path out = o.out.empty() ? fs::path("runs") / run_label(to_string(agent), cfg.env.scenario) : fs::path(o.out);
  const RunManifest m = run_training(cfg, agent, out, &std::cerr);
  std::ifstream summary(out / "summary.txt");
  std::cout << summary.rdbuf();
  std::cout << "manifest: " << (out / "manifest.json").string() << '\n';
  return kOk;
}

// Loads the checkpoint and fills the scenario from it unless one was given.
RunConfig eval_config(const Options& o, Checkpoint& ckpt) {
  RunConfig cfg = base_config(o);
  ckpt = load_checkpoint(o.checkpoint);
  Options effective = o;
  if (effective.scenario.empty()) {
    if (auto it = ckpt.metadata.find("scenario"); it != ckpt.metadata.end()) effective.scenario = it->second;
  }
  apply_overrides(cfg, effective);
  return cfg;
}

int cmd_eval(const Options& o) {
  Checkpoint ckpt;
  const RunConfig cfg = eval_config(o, ckpt);
  const EvaluationResult ev = evaluate_checkpoint(ckpt, cfg, cfg.eval_episodes, cfg.eval_greedy, cfg.seed);
  const std::string label = run_label(ckpt.mode, cfg.env.scenario);
  std::ostringstream table;
  write_metrics_table(table, {{label, summarize({ev.metrics})}});
  std::cout << table.str();
  if (!o.out.empty()) {
    std::ostringstream columns;
    write_metrics_columns(columns, {{label, {ev.metrics}}});
    write_file(fs::path(o.out) / "eval_metrics.tsv", columns.str());
    write_file(fs::path(o.out) / "eval_table.txt", table.str());
  }
  return kOk;
}

int cmd_gradcheck(const Options& o) {
  GradcheckOptions opts;
  if (o.inject_fault == "rad-sign") {
    opts.rad_grad = [](const Eigen::VectorXd& w, const Eigen::VectorXd& phi, double y, double v) {
      return Eigen::VectorXd(-log_grad_rad(w, phi, y, v));
    };
  } else if (!o.inject_fault.empty()) {
    throw validation_error("unknown fault '" + o.inject_fault + "'");
  }
  const GradcheckReport report = run_gradcheck(opts);
  write_gradcheck_report(std::cout, report);
  return report.all_passed() ? kOk : kCheckFailed;
}

int cmd_heatmap(const Options& o) {
  Checkpoint ckpt;
  const RunConfig cfg = eval_config(o, ckpt);
  const TwoTieredPolicy policy = policy_from_checkpoint(ckpt, cfg);
  const auto rows = rap_heatmap(policy, cfg.env, o.resolution);
  std::ostringstream text;
  write_heatmap(text, rows);
  if (o.out.empty()) {
    std::cout << text.str();
  } else {
    write_file(o.out, text.str());
  }
  const RegionMeans r = heatmap_region_means(rows, cfg.env.geometry);
  std::cerr << "mean dribble RAP: halfway region " << r.halfway << " (" << r.halfway_cells << " cells), goal region "
            << r.near_goal << " (" << r.near_goal_cells << " cells)\n";
  return kOk;
}

int cmd_show_config(const Options& o) {
  RunConfig cfg = base_config(o);
  apply_overrides(cfg, o);
  std::cout << canonical_config(cfg);
  std::cerr << "sha256 " << config_hash(cfg) << '\n';
  return kOk;
}

int cmd_verify(const Options& o) {
  const auto problems = verify_manifest(o.manifest);
  for (const auto& p : problems) std::cout << p << '\n';
  std::cout << (problems.empty() ? "manifest verified" : "manifest verification FAILED") << '\n';
  return problems.empty() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware hierarchical policy-gradient agent for a simulated soccer offense task"};
  app.require_subcommand(1);
  Options o;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI configuration file");
    sub->add_option("--seed", o.seed, "run seed");
    sub->add_option("--scenario", o.scenario, "winning or losing")->check(CLI::IsMember({"winning", "losing"}));
  };

  auto* train = app.add_subcommand("train", "train risk-aware agents over several trials");
  auto* er_train = app.add_subcommand("er-train", "train expected-return agents over several trials");
  for (auto* sub : {train, er_train}) {
    add_run_flags(sub);
    sub->add_option("--trials", o.trials, "number of independent trials");
    sub->add_option("--episodes", o.episodes, "training episodes per trial");
    sub->add_option("--episodes-eval", o.eval_episodes, "evaluation episodes per trial");
    sub->add_flag("--greedy", o.greedy, "evaluate with the most probable skill and the RAD mean");
    sub->add_option("--out", o.out, "output directory");
  }

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with a frozen policy");
  add_run_flags(eval);
  eval->add_option("--checkpoint", o.checkpoint, "checkpoint file")->required();
  eval->add_option("--episodes-eval,--episodes", o.eval_episodes, "evaluation episodes (default 100)");
  eval->add_flag("--greedy", o.greedy, "most probable skill (lowest index on ties) at the RAD mean");
  eval->add_option("--out", o.out, "directory for the metrics table and columnar file");

  auto* gradcheck = app.add_subcommand("gradcheck", "check analytic gradients against finite differences");
  gradcheck->add_option("--inject-fault", o.inject_fault)->group("");

  auto* heatmap = app.add_subcommand("heatmap", "dribble RAP mean over a grid of striker positions");
  add_run_flags(heatmap);
  heatmap->add_option("--checkpoint", o.checkpoint, "checkpoint file")->required();
  heatmap->add_option("--resolution", o.resolution, "cells per side")->check(CLI::PositiveNumber);
  heatmap->add_option("--out", o.out, "output file (stdout when omitted)");

  auto* show_config = app.add_subcommand("show-config", "print the effective configuration in canonical form");
  add_run_flags(show_config);
  show_config->add_option("--trials", o.trials, "number of independent trials");
  show_config->add_option("--episodes", o.episodes, "training episodes per trial");

  auto* verify = app.add_subcommand("verify", "re-hash the artifacts listed in a run manifest");
  verify->add_option("--manifest", o.manifest, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (train->parsed()) return cmd_train(o, Agent::saricos);
    if (er_train->parsed()) return cmd_train(o, Agent::er);
    if (eval->parsed()) return cmd_eval(o);
    if (gradcheck->parsed()) return cmd_gradcheck(o);
    if (heatmap->parsed()) return cmd_heatmap(o);
    if (show_config->parsed()) return cmd_show_config(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailed;
  }
  return kUsage;
}
