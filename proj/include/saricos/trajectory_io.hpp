#pragma once

#include <iosfwd>
#include <vector>

#include "saricos/smdp.hpp"

namespace saricos {

// Line-delimited trajectory dump. Each decision is one JSON object per line:
//   {"t":..,"steps":..,"skill":..,"rap":..,"rap_raw":..,"base_reward":..,
//    "aug_reward":..,"reward":..,"w":..}
// "t" is the decision start time and "w" the accumulated reward after the
// decision. With include_state the environment features of the post-decision
// state are added as "state".
void write_trajectory(std::ostream& out, const RiskAwareTrajectory& traj, bool include_state = false);

struct TrajectoryLine {
  int t = 0;
  int steps = 0;
  std::size_t skill = 0;
  double rap = 0.0;
  double rap_raw = 0.0;
  double base_reward = 0.0;
  double aug_reward = 0.0;
  double reward = 0.0;
  double w = 0.0;
  std::vector<double> state;
};

std::vector<TrajectoryLine> read_trajectory(std::istream& in);

}  // namespace saricos
