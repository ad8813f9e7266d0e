#include "saricos/trajectory_io.hpp"

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "saricos/errors.hpp"

namespace saricos {

void write_trajectory(std::ostream& out, const RiskAwareTrajectory& traj, bool include_state) {
  for (const auto& s : traj.steps) {
    nlohmann::ordered_json j;
    j["t"] = s.z.t;
    j["steps"] = s.steps;
    j["skill"] = s.skill;
    j["rap"] = s.rap;
    j["rap_raw"] = s.rap_raw;
    j["base_reward"] = s.base_reward;
    j["aug_reward"] = s.aug_reward;
    j["reward"] = s.reward;
    j["w"] = s.z_next.w;
    if (include_state) j["state"] = s.z_next.env.features;
    out << j.dump() << '\n';
  }
}

std::vector<TrajectoryLine> read_trajectory(std::istream& in) {
  std::vector<TrajectoryLine> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrajectoryLine l;
      l.t = j.at("t").get<int>();
      l.steps = j.at("steps").get<int>();
      l.skill = j.at("skill").get<std::size_t>();
      l.rap = j.at("rap").get<double>();
      l.rap_raw = j.at("rap_raw").get<double>();
      l.base_reward = j.at("base_reward").get<double>();
      l.aug_reward = j.at("aug_reward").get<double>();
      l.reward = j.at("reward").get<double>();
      l.w = j.at("w").get<double>();
      if (j.contains("state")) l.state = j.at("state").get<std::vector<double>>();
      lines.push_back(std::move(l));
    } catch (const nlohmann::json::exception& e) {
      throw validation_error(std::string("malformed trajectory line: ") + e.what());
    }
  }
  return lines;
}

}  // namespace saricos
