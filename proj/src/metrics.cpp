#include "saricos/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "saricos/errors.hpp"

namespace saricos {

MetricsRecord metrics_collect(const std::vector<RiskAwareTrajectory>& batch, RewardMode mode) {
  MetricsRecord m;
  m.episodes = static_cast<int>(batch.size());
  if (batch.empty()) return m;
  double reward = 0.0;
  double length = 0.0;
  for (const auto& t : batch) {
    if (t.event == offense::kGoal) ++m.goals;
    else if (t.event == offense::kCapture) ++m.captures;
    else ++m.out_of_time;
    if (mode == RewardMode::pg_smdp) {
      reward += t.final_w();
    } else {
      double total = 0.0;
      for (const auto& s : t.steps) total += s.base_reward;
      reward += total;
    }
    length += t.env_length;
  }
  m.avg_reward = reward / m.episodes;
  m.avg_episode_length = length / m.episodes;
  return m;
}

namespace {

MetricStat stat(const std::vector<double>& xs) {
  MetricStat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

template <typename F>
MetricStat column(const std::vector<MetricsRecord>& rs, F f) {
  std::vector<double> xs;
  for (const auto& r : rs) xs.push_back(f(r));
  return stat(xs);
}

std::string fmt(const MetricStat& s, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << s.mean << " +- " << s.std;
  return os.str();
}

}  // namespace

MetricsSummary summarize(const std::vector<MetricsRecord>& rs) {
  MetricsSummary s;
  s.trials = static_cast<int>(rs.size());
  s.goals = column(rs, [](const MetricsRecord& r) { return static_cast<double>(r.goals); });
  s.captures = column(rs, [](const MetricsRecord& r) { return static_cast<double>(r.captures); });
  s.out_of_time = column(rs, [](const MetricsRecord& r) { return static_cast<double>(r.out_of_time); });
  s.avg_reward = column(rs, [](const MetricsRecord& r) { return r.avg_reward; });
  s.avg_episode_length = column(rs, [](const MetricsRecord& r) { return r.avg_episode_length; });
  return s;
}

void write_metrics_table(std::ostream& out, const std::vector<std::pair<std::string, MetricsSummary>>& columns) {
  const int label_w = 16;
  const int col_w = 22;
  out << std::left << std::setw(label_w) << "";
  for (const auto& [name, _] : columns) out << std::setw(col_w) << name;
  out << '\n';
  auto row = [&](const char* label, auto get, int precision) {
    out << std::setw(label_w) << label;
    for (const auto& [_, s] : columns) out << std::setw(col_w) << fmt(get(s), precision);
    out << '\n';
  };
  row("Goals", [](const MetricsSummary& s) { return s.goals; }, 1);
  row("Captures", [](const MetricsSummary& s) { return s.captures; }, 1);
  row("Out of Time", [](const MetricsSummary& s) { return s.out_of_time; }, 1);
  row("Avg Reward", [](const MetricsSummary& s) { return s.avg_reward; }, 3);
  row("Episode Length", [](const MetricsSummary& s) { return s.avg_episode_length; }, 1);
  out << std::right;
}

void write_metrics_columns(std::ostream& out,
                           const std::vector<std::pair<std::string, std::vector<MetricsRecord>>>& runs) {
  out << "# saricos-metrics schema_version=1\n";
  out << "label\ttrial\tepisodes\tgoals\tcaptures\tout_of_time\tavg_reward\tavg_episode_length\n";
  out << std::setprecision(10);
  for (const auto& [label, records] : runs) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      out << label << '\t' << i << '\t' << r.episodes << '\t' << r.goals << '\t' << r.captures << '\t'
          << r.out_of_time << '\t' << r.avg_reward << '\t' << r.avg_episode_length << '\n';
    }
  }
}

EvaluationResult evaluate_policy(const offense::OffenseConfig& env_cfg, const TwoTieredPolicy& policy,
                                 const EpisodeConfig& episode, int n_episodes, std::uint64_t seed) {
  if (n_episodes < 1) throw validation_error("evaluation needs at least one episode");
  offense::MiniOffenseEnv env(env_cfg);
  EvaluationResult res;
  res.trajectories.reserve(static_cast<std::size_t>(n_episodes));
  for (int e = 0; e < n_episodes; ++e) {
    auto rng = derive_rng(seed, {static_cast<std::uint64_t>(e)});
    res.trajectories.push_back(run_episode(env, policy, episode, rng));
  }
  res.metrics = metrics_collect(res.trajectories, episode.mode);
  return res;
}

}  // namespace saricos
