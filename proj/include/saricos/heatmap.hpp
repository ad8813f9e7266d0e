#pragma once

#include <iosfwd>
#include <vector>

#include "saricos/mini_offense.hpp"
#include "saricos/policy.hpp"

namespace saricos {

struct HeatmapRow {
  double x = 0.0;
  double y = 0.0;
  double rap_mean = 0.0;     // phi(s)^T omega_skill
  double rap_clamped = 0.0;  // rap_mean clamped to the policy's RAP range
};

// RAD mean of `skill` with the striker (and ball) at the centre of each cell
// of a resolution x resolution grid over the half field. The keeper waits at
// the middle of its line, the score is the scenario's, and w, t are fixed.
std::vector<HeatmapRow> rap_heatmap(const TwoTieredPolicy& policy, const offense::OffenseConfig& env,
                                    int resolution, double w = 0.0, int t = 0,
                                    offense::Skill skill = offense::Skill::dribble);

// "#" header with the schema version, a column-name row, then one row per cell.
void write_heatmap(std::ostream& out, const std::vector<HeatmapRow>& rows);

inline constexpr double kHalfwayRegionMaxX = 0.25;
inline constexpr double kGoalRegionRadius = 0.35;

struct RegionMeans {
  double halfway = 0.0;    // cells with x <= kHalfwayRegionMaxX
  double near_goal = 0.0;  // cells closer than kGoalRegionRadius to the goal centre
  int halfway_cells = 0;
  int near_goal_cells = 0;
};

// Means of the clamped column over the two regions; NaN for an empty region.
RegionMeans heatmap_region_means(const std::vector<HeatmapRow>& rows, const offense::Geometry& g);

}  // namespace saricos
