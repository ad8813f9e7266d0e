#include "saricos/heatmap.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <ostream>

#include "saricos/errors.hpp"

namespace saricos {

std::vector<HeatmapRow> rap_heatmap(const TwoTieredPolicy& policy, const offense::OffenseConfig& env,
                                    int resolution, double w, int t, offense::Skill skill) {
  if (resolution < 1) throw validation_error("heatmap resolution must be at least 1");
  const auto& g = env.geometry;
  rng_t unused(0);
  const offense::FieldState context = offense::scenario_init(env.scenario, g, unused);
  const RapClamp clamp = policy.params().clamp;

  std::vector<HeatmapRow> rows;
  rows.reserve(static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      offense::FieldState s = context;
      s.striker = {(i + 0.5) / resolution, (j + 0.5) / resolution};
      s.ball = s.striker;
      s.keeper = {g.keeper_line_x, g.goal_center.y};
      s.possession = offense::Possession::striker;
      const AugmentedState z{offense::encode(s), w, t};
      HeatmapRow r;
      r.x = s.striker.x;
      r.y = s.striker.y;
      r.rap_mean = policy.rap_mean(z, static_cast<std::size_t>(skill));
      r.rap_clamped = std::clamp(r.rap_mean, clamp.lo, clamp.hi);
      rows.push_back(r);
    }
  }
  return rows;
}

void write_heatmap(std::ostream& out, const std::vector<HeatmapRow>& rows) {
  out << "# saricos-heatmap schema_version=1\n";
  out << "x\ty\trap_mean\trap_clamped\n";
  out << std::setprecision(10);
  for (const auto& r : rows) out << r.x << '\t' << r.y << '\t' << r.rap_mean << '\t' << r.rap_clamped << '\n';
}

RegionMeans heatmap_region_means(const std::vector<HeatmapRow>& rows, const offense::Geometry& g) {
  RegionMeans m;
  double halfway = 0.0;
  double near = 0.0;
  for (const auto& r : rows) {
    if (r.x <= kHalfwayRegionMaxX) {
      halfway += r.rap_clamped;
      ++m.halfway_cells;
    }
    if (offense::goal_distance(g, {r.x, r.y}) < kGoalRegionRadius) {
      near += r.rap_clamped;
      ++m.near_goal_cells;
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.halfway = m.halfway_cells > 0 ? halfway / m.halfway_cells : nan;
  m.near_goal = m.near_goal_cells > 0 ? near / m.near_goal_cells : nan;
  return m;
}

}  // namespace saricos
