#include "saricos/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <openssl/evp.h>

namespace saricos {

namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw validation_error("cannot format number");
  return std::string(buf.data(), end);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw validation_error("'" + s + "' is not a number");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
    throw validation_error("'" + s + "' is not an integer in range");
  }
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw validation_error("'" + s + "' is not true or false");
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename Member>
Field real(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig& c) { return format_double(member(c)); },
          [member](RunConfig& c, const std::string& v) { member(c) = parse_double(v); }};
}

template <typename Int, typename Member>
Field integer(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig& c) { return std::to_string(member(c)); },
          [member](RunConfig& c, const std::string& v) { member(c) = parse_int<Int>(v); }};
}

template <typename Member>
Field boolean(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const RunConfig& c) { return std::string(member(c) ? "true" : "false"); },
          [member](RunConfig& c, const std::string& v) { member(c) = parse_bool(v); }};
}

#define SARICOS_REF(expr) [](auto& c) -> auto& { return expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(integer<std::uint64_t>("run", "seed", SARICOS_REF(c.seed)));
    f.push_back(integer<int>("run", "trials", SARICOS_REF(c.trials)));
    f.push_back(integer<unsigned>("run", "workers", SARICOS_REF(c.workers)));

    f.push_back(integer<int>("episode", "horizon", SARICOS_REF(c.episode.horizon)));
    f.push_back(real("episode", "beta", SARICOS_REF(c.episode.beta)));

    f.push_back(real("policy", "initial_rap", SARICOS_REF(c.initial_rap)));
    f.push_back(real("policy", "variance", SARICOS_REF(c.variance)));
    f.push_back(integer<int>("policy", "fourier_order", SARICOS_REF(c.fourier_order)));

    f.push_back(integer<long>("learner", "episodes", SARICOS_REF(c.episodes)));
    f.push_back(integer<int>("learner", "batch_size", SARICOS_REF(c.batch_size)));
    f.push_back(real("learner", "a0", SARICOS_REF(c.a0)));
    f.push_back(real("learner", "p_a", SARICOS_REF(c.p_a)));
    f.push_back(real("learner", "b0", SARICOS_REF(c.b0)));
    f.push_back(real("learner", "p_b", SARICOS_REF(c.p_b)));
    f.push_back(real("learner", "alpha_bound", SARICOS_REF(c.alpha_bound)));
    f.push_back(real("learner", "omega_bound", SARICOS_REF(c.omega_bound)));
    f.push_back({"learner", "estimator", [](const RunConfig& c) { return to_string(c.estimator); },
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.estimator = estimator_from_string(v);
                   } catch (const config_error& e) {
                     throw validation_error(e.what());
                   }
                 }});
    f.push_back(real("learner", "critic_step", SARICOS_REF(c.critic_step)));
    f.push_back(boolean("learner", "early_stop", SARICOS_REF(c.early_stop)));
    f.push_back(integer<long>("learner", "early_stop_window", SARICOS_REF(c.early_stop_window)));
    f.push_back(real("learner", "early_stop_tolerance", SARICOS_REF(c.early_stop_tolerance)));
    f.push_back(integer<long>("learner", "early_stop_min_episodes", SARICOS_REF(c.early_stop_min_episodes)));

    f.push_back({"env", "scenario", [](const RunConfig& c) { return offense::to_string(c.env.scenario); },
                 [](RunConfig& c, const std::string& v) {
                   try {
                     c.env.scenario = offense::scenario_from_string(v);
                   } catch (const config_error& e) {
                     throw validation_error(e.what());
                   }
                 }});
    f.push_back(real("env", "goal_half_width", SARICOS_REF(c.env.geometry.goal_half_width)));
    f.push_back(real("env", "box_radius", SARICOS_REF(c.env.geometry.box_radius)));
    f.push_back(real("env", "striker_speed", SARICOS_REF(c.env.geometry.striker_speed)));
    f.push_back(real("env", "keeper_speed_ratio", SARICOS_REF(c.env.geometry.keeper_speed_ratio)));
    f.push_back(real("env", "reach_radius", SARICOS_REF(c.env.geometry.reach_radius)));
    f.push_back(real("env", "keeper_line_x", SARICOS_REF(c.env.geometry.keeper_line_x)));
    f.push_back(real("env", "patrol_half_width", SARICOS_REF(c.env.geometry.patrol_half_width)));
    f.push_back(real("env", "rush_radius", SARICOS_REF(c.env.geometry.rush_radius)));
    f.push_back(real("env", "keeper_reaction", SARICOS_REF(c.env.geometry.keeper_reaction)));
    f.push_back(real("env", "rap_max", SARICOS_REF(c.env.geometry.rap_max)));
    f.push_back(real("env", "rap_per_step", SARICOS_REF(c.env.geometry.rap_per_step)));
    f.push_back(real("env", "dribble_max_distance", SARICOS_REF(c.env.geometry.dribble_max_distance)));
    f.push_back(real("env", "dribble_angle_noise", SARICOS_REF(c.env.geometry.dribble_angle_noise)));
    f.push_back(real("env", "dribble_power_noise", SARICOS_REF(c.env.geometry.dribble_power_noise)));
    f.push_back(real("env", "min_dribble_advance", SARICOS_REF(c.env.geometry.min_dribble_advance)));
    f.push_back(integer<int>("env", "shoot_steps", SARICOS_REF(c.env.geometry.shoot_steps)));
    f.push_back(real("env", "shoot_range", SARICOS_REF(c.env.geometry.shoot_range)));
    f.push_back(real("env", "shot_bias", SARICOS_REF(c.env.geometry.shot_bias)));
    f.push_back(real("env", "shot_distance_weight", SARICOS_REF(c.env.geometry.shot_distance_weight)));
    f.push_back(real("env", "shot_margin_weight", SARICOS_REF(c.env.geometry.shot_margin_weight)));
    f.push_back(real("env", "shot_margin_cap", SARICOS_REF(c.env.geometry.shot_margin_cap)));
    f.push_back(real("env", "start_x", SARICOS_REF(c.env.geometry.start_x)));
    f.push_back(real("env", "start_jitter_x", SARICOS_REF(c.env.geometry.start_jitter_x)));
    f.push_back(real("env", "start_jitter_y", SARICOS_REF(c.env.geometry.start_jitter_y)));

    f.push_back(real("rewards", "r_move", SARICOS_REF(c.env.rewards.r_move)));
    f.push_back(real("rewards", "r_dribble_far", SARICOS_REF(c.env.rewards.r_dribble_far)));
    f.push_back(real("rewards", "r_dribble_near", SARICOS_REF(c.env.rewards.r_dribble_near)));
    f.push_back(real("rewards", "r_shoot_near", SARICOS_REF(c.env.rewards.r_shoot_near)));
    f.push_back(real("rewards", "r_shoot_far", SARICOS_REF(c.env.rewards.r_shoot_far)));
    f.push_back(real("rewards", "r_score_win", SARICOS_REF(c.env.rewards.r_score_win)));
    f.push_back(real("rewards", "r_score_lose", SARICOS_REF(c.env.rewards.r_score_lose)));
    f.push_back(real("rewards", "goal_reward", SARICOS_REF(c.env.rewards.goal_reward)));
    f.push_back(real("rewards", "near_box_threshold", SARICOS_REF(c.env.rewards.near_box_threshold)));

    f.push_back(integer<int>("eval", "episodes", SARICOS_REF(c.eval_episodes)));
    f.push_back(boolean("eval", "greedy", SARICOS_REF(c.eval_greedy)));
    return f;
  }();
  return table;
}

#undef SARICOS_REF

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

template <typename Fn>
void check(std::vector<std::string>& issues, const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    issues.push_back(where + ": " + e.what());
  }
}

}  // namespace

invalid_config::invalid_config(std::vector<std::string> issues)
    : config_error([&] {
        std::string msg = "invalid configuration (" + std::to_string(issues.size()) + " problem" +
                          (issues.size() == 1 ? "" : "s") + ")";
        for (const auto& i : issues) msg += "\n  - " + i;
        return msg;
      }()),
      issues_(std::move(issues)) {}

FeatureSpec RunConfig::inter_spec() const {
  FeatureSpec spec = offense::default_inter_spec();
  spec.order = fourier_order;
  return spec;
}

TrainConfig RunConfig::train_config(std::uint64_t trial_seed, std::uint64_t trial) const {
  TrainConfig tc;
  tc.episode = episode;
  tc.episode.mode = RewardMode::pg_smdp;
  tc.episode.gamma = 1.0;
  tc.episodes = episodes;
  tc.batch_size = batch_size;
  tc.schedule = StepSchedule(a0, p_a, b0, p_b);
  tc.boxes.alpha = {-alpha_bound, alpha_bound};
  tc.boxes.omega = {-omega_bound, omega_bound};
  tc.estimator = estimator;
  tc.critic_step = critic_step;
  tc.seed = trial_seed;
  tc.trial = trial;
  tc.workers = workers;
  tc.early_stop = early_stop;
  tc.early_stop_window = early_stop_window;
  tc.early_stop_tolerance = early_stop_tolerance;
  tc.early_stop_min_episodes = early_stop_min_episodes;
  return tc;
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> issues;
  if (c.trials < 1) issues.push_back("[run] trials must be at least 1");
  if (c.workers < 1) issues.push_back("[run] workers must be at least 1");
  check(issues, "[episode]", [&] { c.episode.validate(); });
  if (!(c.variance > 0.0)) issues.push_back("[policy] variance must be positive");
  if (!(c.initial_rap >= 0.0 && c.initial_rap <= c.env.geometry.rap_max)) {
    issues.push_back("[policy] initial_rap must lie in [0, rap_max]");
  }
  if (c.fourier_order < 1) issues.push_back("[policy] fourier_order must be at least 1");
  if (c.episodes < 1) issues.push_back("[learner] episodes must be positive");
  if (c.batch_size < 1) issues.push_back("[learner] batch_size must be positive");
  check(issues, "[learner] step schedule", [&] { StepSchedule(c.a0, c.p_a, c.b0, c.p_b); });
  if (!(c.alpha_bound > 0.0)) issues.push_back("[learner] alpha_bound must be positive");
  if (!(c.omega_bound > 0.0)) issues.push_back("[learner] omega_bound must be positive");
  if (!(c.critic_step >= 0.0)) issues.push_back("[learner] critic_step must be nonnegative");
  if (c.early_stop_window < 1) issues.push_back("[learner] early_stop_window must be positive");
  if (!(c.early_stop_tolerance >= 0.0)) issues.push_back("[learner] early_stop_tolerance must be nonnegative");
  check(issues, "[env]", [&] { c.env.geometry.validate(); });
  for (const auto& v : c.env.rewards.violations()) issues.push_back("[rewards] " + v);
  if (c.eval_episodes < 1) issues.push_back("[eval] episodes must be positive");
  return issues;
}

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value) {
  const Field* f = find_field(section, key);
  if (!f) throw invalid_config({"[" + section + "] " + key + ": unknown key"});
  try {
    f->set(cfg, value);
  } catch (const validation_error& e) {
    throw invalid_config({"[" + section + "] " + key + ": " + e.what()});
  }
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw invalid_config({std::string("syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
  }

  RunConfig cfg;
  std::vector<std::string> issues;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      issues.push_back(section + ": keys must sit inside a section");
      continue;
    }
    for (const auto& [key, node] : body) {
      const Field* f = find_field(section, key);
      if (!f) {
        issues.push_back("[" + section + "] " + key + ": unknown key");
        continue;
      }
      try {
        f->set(cfg, node.data());
      } catch (const validation_error& e) {
        issues.push_back("[" + section + "] " + key + ": " + e.what());
      }
    }
  }
  for (auto& i : validate_config(cfg)) issues.push_back(std::move(i));
  if (!issues.empty()) throw invalid_config(std::move(issues));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "; saricos-config schema_version=" << kConfigSchemaVersion << '\n';
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw io_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(digest[i]);
  return hex.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(canonical_config(cfg)); }

}  // namespace saricos
