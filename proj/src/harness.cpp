#include "saricos/harness.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "saricos/er_baseline.hpp"
#include "saricos/mini_offense.hpp"
#include "saricos/random.hpp"

namespace saricos {

namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << text;
  if (!out) throw io_error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ojson metrics_json(const MetricsRecord& m) {
  ojson j;
  j["episodes"] = m.episodes;
  j["goals"] = m.goals;
  j["captures"] = m.captures;
  j["out_of_time"] = m.out_of_time;
  j["avg_reward"] = m.avg_reward;
  j["avg_episode_length"] = m.avg_episode_length;
  return j;
}

MetricsRecord metrics_from(const ojson& j) {
  MetricsRecord m;
  m.episodes = j.at("episodes").get<int>();
  m.goals = j.at("goals").get<int>();
  m.captures = j.at("captures").get<int>();
  m.out_of_time = j.at("out_of_time").get<int>();
  m.avg_reward = j.at("avg_reward").get<double>();
  m.avg_episode_length = j.at("avg_episode_length").get<double>();
  return m;
}

// Evaluation stream tag, kept apart from the learner's {trial, iteration, episode} paths.
constexpr std::uint64_t kEvalStream = 0x65766131;

}  // namespace

std::string to_string(Agent a) { return a == Agent::saricos ? "saricos" : "er"; }

Agent agent_from_string(const std::string& s) {
  if (s == "saricos") return Agent::saricos;
  if (s == "er") return Agent::er;
  throw validation_error("agent must be 'saricos' or 'er', got '" + s + "'");
}

std::string manifest_to_json(const RunManifest& m) {
  ojson j;
  j["schema_version"] = m.schema_version;
  j["mode"] = m.mode;
  j["scenario"] = m.scenario;
  j["config"] = {{"path", m.config_path}, {"sha256", m.config_hash}};
  j["seed"] = m.seed;
  ojson trials = ojson::array();
  for (const auto& t : m.trials) {
    ojson tj;
    tj["trial"] = t.trial;
    tj["seed"] = t.seed;
    tj["eval_seed"] = t.eval_seed;
    tj["episodes_run"] = t.episodes_run;
    tj["early_stopped"] = t.early_stopped;
    tj["checkpoint"] = t.checkpoint;
    tj["curve"] = t.curve;
    tj["metrics"] = t.metrics;
    tj["evaluation"] = metrics_json(t.eval);
    tj["warnings"] = t.warnings;
    trials.push_back(std::move(tj));
  }
  j["trials"] = std::move(trials);
  ojson artifacts = ojson::array();
  for (const auto& a : m.artifacts) artifacts.push_back({{"path", a.path}, {"sha256", a.sha256}});
  j["artifacts"] = std::move(artifacts);
  j["started"] = m.started;
  j["finished"] = m.finished;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const ojson j = ojson::parse(text);
    RunManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kManifestSchemaVersion) {
      throw validation_error("unsupported manifest schema_version " + std::to_string(m.schema_version));
    }
    m.mode = j.at("mode").get<std::string>();
    m.scenario = j.at("scenario").get<std::string>();
    m.config_path = j.at("config").at("path").get<std::string>();
    m.config_hash = j.at("config").at("sha256").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& tj : j.at("trials")) {
      TrialRecord t;
      t.trial = tj.at("trial").get<std::uint64_t>();
      t.seed = tj.at("seed").get<std::uint64_t>();
      t.eval_seed = tj.at("eval_seed").get<std::uint64_t>();
      t.episodes_run = tj.at("episodes_run").get<long>();
      t.early_stopped = tj.at("early_stopped").get<bool>();
      t.checkpoint = tj.at("checkpoint").get<std::string>();
      t.curve = tj.at("curve").get<std::string>();
      t.metrics = tj.at("metrics").get<std::string>();
      t.eval = metrics_from(tj.at("evaluation"));
      t.warnings = tj.at("warnings").get<std::vector<std::string>>();
      m.trials.push_back(std::move(t));
    }
    for (const auto& a : j.at("artifacts")) {
      m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
    }
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const fs::path& path, const RunManifest& m) { write_text(path, manifest_to_json(m)); }

RunManifest read_manifest(const fs::path& path) { return manifest_from_json(read_text(path)); }

std::vector<std::string> verify_manifest(const fs::path& manifest_path) {
  const RunManifest m = read_manifest(manifest_path);
  const fs::path root = manifest_path.parent_path();
  std::vector<std::string> problems;
  for (const auto& a : m.artifacts) {
    const fs::path p = root / a.path;
    if (!fs::exists(p)) {
      problems.push_back(a.path + ": missing");
      continue;
    }
    const std::string digest = sha256_file(p);
    if (digest != a.sha256) problems.push_back(a.path + ": sha256 " + digest + " != recorded " + a.sha256);
  }
  const fs::path cfg_path = root / m.config_path;
  if (!fs::exists(cfg_path)) {
    problems.push_back(m.config_path + ": stored config missing");
  } else {
    try {
      const std::string hash = config_hash(parse_config(read_text(cfg_path)));
      if (hash != m.config_hash) problems.push_back("config hash " + hash + " != recorded " + m.config_hash);
    } catch (const config_error& e) {
      problems.push_back(m.config_path + ": " + e.what());
    }
  }
  return problems;
}

std::uint64_t trial_seed(std::uint64_t run_seed, std::uint64_t trial) { return derive_seed(run_seed, {trial}); }

std::uint64_t evaluation_seed(std::uint64_t seed) { return derive_seed(seed, {kEvalStream}); }

std::shared_ptr<FeatureMap> make_run_feature_map(const RunConfig& cfg) {
  return offense::make_feature_map(cfg.env, cfg.episode.horizon, cfg.inter_spec());
}

TwoTieredPolicy initial_policy(const RunConfig& cfg) {
  auto fm = make_run_feature_map(cfg);
  return TwoTieredPolicy(offense::initial_params(*fm, cfg.initial_rap, cfg.variance, cfg.env.geometry.rap_max), fm);
}

Checkpoint make_checkpoint(const RunConfig& cfg, Agent agent, const PolicyParams& params, std::uint64_t trial,
                           std::uint64_t seed) {
  Checkpoint c;
  c.params = params;
  c.inter_spec = cfg.inter_spec();
  c.rad_kind = make_run_feature_map(cfg)->rad_kind();
  c.mode = to_string(agent);
  c.seed_lineage = {cfg.seed, trial, seed};
  c.metadata["scenario"] = offense::to_string(cfg.env.scenario);
  c.metadata["config_sha256"] = config_hash(cfg);
  c.metadata["horizon"] = std::to_string(cfg.episode.horizon);
  return c;
}

TwoTieredPolicy policy_from_checkpoint(const Checkpoint& ckpt, const RunConfig& cfg) {
  if (ckpt.inter_spec.dims() != offense::default_inter_spec().dims()) {
    throw validation_error("checkpoint inter-skill features cover " + std::to_string(ckpt.inter_spec.dims()) +
                           " state dimensions, the environment provides " +
                           std::to_string(offense::default_inter_spec().dims()));
  }
  auto fm = offense::make_feature_map(cfg.env, cfg.episode.horizon, ckpt.inter_spec);
  const auto rows = static_cast<Eigen::Index>(offense::kNumSkills);
  const auto inter = static_cast<Eigen::Index>(fm->inter_size());
  const auto rad = static_cast<Eigen::Index>(fm->rad_size());
  const auto& p = ckpt.params;
  if (ckpt.rad_kind != fm->rad_kind() || p.alpha.rows() != rows || p.alpha.cols() != inter ||
      p.omega.rows() != rows || p.omega.cols() != rad) {
    std::ostringstream msg;
    msg << "checkpoint does not match the environment: expected alpha " << rows << "x" << inter << ", omega "
        << rows << "x" << rad << " (" << fm->rad_kind() << "); got alpha " << p.alpha.rows() << "x"
        << p.alpha.cols() << ", omega " << p.omega.rows() << "x" << p.omega.cols() << " (" << ckpt.rad_kind << ")";
    throw validation_error(msg.str());
  }
  return TwoTieredPolicy(p, fm);
}

EvaluationResult evaluate_checkpoint(const Checkpoint& ckpt, const RunConfig& cfg, int episodes, bool greedy,
                                     std::uint64_t seed) {
  TwoTieredPolicy policy = policy_from_checkpoint(ckpt, cfg);
  policy.set_greedy(greedy);
  EpisodeConfig ep = cfg.episode;
  ep.mode = RewardMode::pg_smdp;
  ep.gamma = 1.0;
  return evaluate_policy(cfg.env, policy, ep, episodes, seed);
}

std::string run_label(const std::string& mode, offense::Scenario scenario) {
  return mode + "/" + offense::to_string(scenario);
}

RunManifest run_training(const RunConfig& cfg, Agent agent, const fs::path& out, std::ostream* log) {
  if (auto issues = validate_config(cfg); !issues.empty()) throw invalid_config(std::move(issues));
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw io_error("cannot create output directory " + out.string() + ": " + ec.message());

  RunManifest m;
  m.mode = to_string(agent);
  m.scenario = offense::to_string(cfg.env.scenario);
  m.config_path = "config.ini";
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.started = utc_now();

  std::vector<std::string> written;
  write_text(out / m.config_path, canonical_config(cfg));

  const offense::OffenseConfig env_cfg = cfg.env;
  const EnvFactory make_env = [env_cfg] { return std::make_unique<offense::MiniOffenseEnv>(env_cfg); };
  const std::string label = run_label(m.mode, cfg.env.scenario);

  std::vector<MetricsRecord> evals;
  for (int i = 0; i < cfg.trials; ++i) {
    const auto trial = static_cast<std::uint64_t>(i);
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = trial_seed(cfg.seed, trial);
    rec.eval_seed = evaluation_seed(rec.seed);

    const TwoTieredPolicy init = initial_policy(cfg);
    const TrainConfig tc = cfg.train_config(rec.seed, trial);
    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult res = agent == Agent::saricos ? train(make_env, init, tc) : train_er(make_env, init, ErConfig(tc));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string dir = "trial_" + std::to_string(i);
    fs::create_directories(out / dir, ec);
    if (ec) throw io_error("cannot create " + (out / dir).string() + ": " + ec.message());
    rec.checkpoint = dir + "/checkpoint.json";
    rec.curve = dir + "/curve.tsv";
    rec.metrics = dir + "/metrics.tsv";

    const Checkpoint ckpt = make_checkpoint(cfg, agent, res.params, trial, rec.seed);
    save_checkpoint(out / rec.checkpoint, ckpt);
    {
      std::ostringstream curve;
      write_curve(curve, res.curve);
      write_text(out / rec.curve, curve.str());
    }
    const EvaluationResult ev = evaluate_checkpoint(ckpt, cfg, cfg.eval_episodes, cfg.eval_greedy, rec.eval_seed);
    {
      std::ostringstream metrics;
      write_metrics_columns(metrics, {{label, {ev.metrics}}});
      write_text(out / rec.metrics, metrics.str());
    }
    rec.eval = ev.metrics;
    rec.episodes_run = res.episodes_run;
    rec.early_stopped = res.early_stopped;
    rec.warnings = res.warnings;
    evals.push_back(ev.metrics);
    written.insert(written.end(), {rec.checkpoint, rec.curve, rec.metrics});

    if (log) {
      *log << label << " trial " << i << ": " << res.episodes_run << " episodes in " << std::fixed
           << std::setprecision(1) << secs << " s; eval goals " << ev.metrics.goals << "/" << ev.metrics.episodes
           << ", avg reward " << std::setprecision(3) << ev.metrics.avg_reward << ", avg length "
           << std::setprecision(1) << ev.metrics.avg_episode_length << std::defaultfloat << '\n';
      for (const auto& w : res.warnings) *log << "  warning: " << w << '\n';
    }
    m.trials.push_back(std::move(rec));
  }

  {
    std::ostringstream table;
    write_metrics_table(table, {{label, summarize(evals)}});
    write_text(out / "summary.txt", table.str());
    std::ostringstream columns;
    write_metrics_columns(columns, {{label, evals}});
    write_text(out / "metrics.tsv", columns.str());
  }
  written.insert(written.end(), {"summary.txt", "metrics.tsv", m.config_path});
  for (const auto& rel : written) m.artifacts.push_back({rel, sha256_file(out / rel)});

  m.finished = utc_now();
  write_manifest(out / "manifest.json", m);
  return m;
}

}  // namespace saricos
