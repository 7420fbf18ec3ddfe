#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "udn/energy.hpp"
#include "udn/errors.hpp"
#include "udn/geometry.hpp"

namespace udn {

enum class ScheduleKind { fixed, valley, ramp };

inline const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::fixed: return "fixed";
    case ScheduleKind::valley: return "valley";
    case ScheduleKind::ramp: return "ramp";
  }
  return "?";
}

/// Per-slot transmit powers with a common cap.
struct PowerSchedule {
  std::vector<double> p_w;
  double cap_w = 0.0;
};

inline void validate(const PowerSchedule& s) {
  for (double p : s.p_w)
    if (!(p >= 0.0) || p > s.cap_w + 1e-12)
      throw invalid_parameter("PowerSchedule: power outside [0, cap]");
}

/// fixed: the cap everywhere. valley: symmetric quadratic, cap at both ends,
/// cap/4 in the middle. ramp: linear from cap/4 up to the cap.
inline PowerSchedule build_schedule(ScheduleKind kind, int slots, double cap_w) {
  if (slots < 1) throw invalid_parameter("build_schedule: slots must be >= 1");
  if (!(cap_w >= 0.0)) throw invalid_parameter("build_schedule: cap must be >= 0");
  PowerSchedule schedule;
  schedule.cap_w = cap_w;
  schedule.p_w.resize(slots);
  const double mid = (slots - 1) / 2.0;
  for (int n = 0; n < slots; ++n) {
    switch (kind) {
      case ScheduleKind::fixed:
        schedule.p_w[n] = cap_w;
        break;
      case ScheduleKind::valley: {
        const double t = mid > 0.0 ? (n - mid) / mid : 0.0;
        schedule.p_w[n] = cap_w / 4.0 + (3.0 * cap_w / 4.0) * t * t;
        break;
      }
      case ScheduleKind::ramp: {
        const double t = slots > 1 ? static_cast<double>(n) / (slots - 1) : 0.0;
        schedule.p_w[n] = cap_w / 4.0 + (3.0 * cap_w / 4.0) * t;
        break;
      }
    }
  }
  return schedule;
}

/// Wireless energy transfer over a node grid: one trajectory, one schedule.
struct WetConfig {
  int grid_rows = 20;
  int grid_cols = 20;
  AreaSpec area{1000.0, 1000.0};
  double altitude_m = 100.0;
  PathKind trajectory = PathKind::sigmoid;
  ScheduleKind schedule = ScheduleKind::fixed;
  double speed_mps = 10.0;
  double slot_s = 1.0;
  double duration_s = 0.0;  // 0: fly the path exactly once
  double power_cap_w = 5.0;
  ChannelParams channel;
  HarvestParams harvest;
};

inline void validate(const WetConfig& cfg) {
  validate(cfg.area);
  validate(cfg.channel);
  validate(cfg.harvest);
  if (cfg.grid_rows < 1 || cfg.grid_cols < 1)
    throw invalid_parameter("WetConfig: grid must be at least 1x1");
  if (!(cfg.altitude_m > 0.0))
    throw invalid_parameter("WetConfig: altitude must be positive");
  if (!(cfg.speed_mps > 0.0) && cfg.trajectory != PathKind::hover)
    throw invalid_parameter("WetConfig: speed must be positive");
  if (!(cfg.slot_s > 0.0)) throw invalid_parameter("WetConfig: slot must be positive");
  if (!(cfg.duration_s >= 0.0))
    throw invalid_parameter("WetConfig: duration must be >= 0");
  if (!(cfg.power_cap_w >= 0.0))
    throw invalid_parameter("WetConfig: power cap must be >= 0");
}

struct WetResult {
  NodeSet nodes;
  Trajectory trajectory;
  PowerSchedule schedule;
  std::vector<double> energy_j;
  std::vector<double> energy_norm;  // energy_j / max energy, in [0, 1]
};

/// Builds the trajectory and schedule, runs the harvest, and normalizes by
/// the best-served node.
inline WetResult run_wet(const WetConfig& cfg) {
  validate(cfg);
  WetResult result;
  result.nodes = make_grid(cfg.area, cfg.grid_rows, cfg.grid_cols);

  double duration = cfg.duration_s;
  if (duration == 0.0) {
    // fly the path exactly once: whole slots covering length / speed
    const double length = path_length(cfg.trajectory, cfg.area);
    const double slots =
        std::max(1.0, std::ceil(length / (cfg.speed_mps * cfg.slot_s) - 1e-9));
    duration = slots * cfg.slot_s;
  }
  result.trajectory = build_trajectory(cfg.trajectory, cfg.area, cfg.altitude_m,
                                       cfg.trajectory == PathKind::hover ? 1.0
                                                                         : cfg.speed_mps,
                                       duration, cfg.slot_s);
  result.schedule = build_schedule(
      cfg.schedule, static_cast<int>(result.trajectory.slot_count()), cfg.power_cap_w);
  result.energy_j = harvested_energy(result.trajectory, result.schedule.p_w,
                                     result.nodes, cfg.channel, cfg.harvest);
  const double peak = *std::max_element(result.energy_j.begin(), result.energy_j.end());
  result.energy_norm.resize(result.energy_j.size());
  for (std::size_t k = 0; k < result.energy_j.size(); ++k)
    result.energy_norm[k] = peak > 0.0 ? result.energy_j[k] / peak : 0.0;
  return result;
}

struct ScheduleComparison {
  std::vector<double> ratio;  // per node: E_b / E_a where E_a > 0, else NaN
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
};

/// Per-node energy ratio of two runs that differ only in their schedules.
inline ScheduleComparison compare_schedules(const WetResult& a, const WetResult& b) {
  if (a.trajectory.positions != b.trajectory.positions ||
      a.trajectory.slot_s != b.trajectory.slot_s)
    throw invalid_comparison("compare_schedules: trajectories differ");
  if (a.nodes.positions != b.nodes.positions)
    throw invalid_comparison("compare_schedules: node sets differ");

  ScheduleComparison cmp;
  cmp.ratio.assign(a.energy_j.size(), std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  std::size_t counted = 0;
  cmp.min_ratio = std::numeric_limits<double>::infinity();
  cmp.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.energy_j.size(); ++k) {
    if (!(a.energy_j[k] > 0.0)) continue;
    const double r = b.energy_j[k] / a.energy_j[k];
    cmp.ratio[k] = r;
    cmp.min_ratio = std::min(cmp.min_ratio, r);
    cmp.max_ratio = std::max(cmp.max_ratio, r);
    sum += r;
    ++counted;
  }
  cmp.mean_ratio = counted > 0 ? sum / counted : 0.0;
  return cmp;
}

/// Normalized energies as a rows x cols matrix in grid order.
inline std::vector<std::vector<double>> map_matrix(const WetResult& result,
                                                   int rows, int cols) {
  if (result.energy_norm.size() != static_cast<std::size_t>(rows) * cols)
    throw invalid_parameter("map_matrix: result does not match the grid shape");
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m[i][j] = result.energy_norm[i * cols + j];
  return m;
}

}  // namespace udn
