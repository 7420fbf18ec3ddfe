#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udn/errors.hpp"
#include "udn/rng.hpp"

namespace udn {

struct Point3 {
  double x = 0.0;  // m
  double y = 0.0;  // m
  double z = 0.0;  // m, altitude, >= 0 for valid points

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double distance(const Point3& p, const Point3& q) {
  const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double squared_distance(const Point3& p, const Point3& q) {
  const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
  return dx * dx + dy * dy + dz * dz;
}

inline double horizontal_distance(const Point3& p, const Point3& q) {
  return std::hypot(p.x - q.x, p.y - q.y);
}

inline void validate(const Point3& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
    throw invalid_parameter("Point3: coordinates must be finite");
  if (p.z < 0.0) throw invalid_parameter("Point3: altitude must be >= 0");
}

/// Axis-aligned rectangular deployment region with origin at (0, 0).
struct AreaSpec {
  double width = 1000.0;   // m, x extent
  double height = 1000.0;  // m, y extent

  bool contains(const Point3& p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
  }
  Point3 center(double altitude = 0.0) const {
    return {width / 2.0, height / 2.0, altitude};
  }
};

inline void validate(const AreaSpec& a) {
  if (!(a.width > 0.0) || !(a.height > 0.0))
    throw invalid_parameter("AreaSpec: width and height must be positive");
}

/// Ground nodes (z = 0) inside an owning area.
struct NodeSet {
  std::vector<Point3> positions;

  std::size_t size() const { return positions.size(); }
};

/// Homogeneous Poisson point process over the area. Node count is Poisson
/// with mean density*area; positions are i.i.d. uniform. Deterministic in
/// the seed.
inline NodeSet sample_ppp(const AreaSpec& area, double density_per_m2,
                          std::uint64_t seed) {
  validate(area);
  if (!(density_per_m2 >= 0.0) || !std::isfinite(density_per_m2))
    throw invalid_parameter("sample_ppp: density must be >= 0");
  Rng rng(seed);
  const std::uint64_t count = rng.poisson(density_per_m2 * area.width * area.height);
  NodeSet nodes;
  nodes.positions.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double x = rng.uniform(0.0, area.width);
    const double y = rng.uniform(0.0, area.height);
    nodes.positions.push_back({x, y, 0.0});
  }
  return nodes;
}

/// rows x cols nodes at the cell centers of an even partition of the area.
/// Node (i, j) lands at ((j+1/2)*width/cols, (i+1/2)*height/rows), row-major.
inline NodeSet make_grid(const AreaSpec& area, int rows, int cols) {
  validate(area);
  if (rows < 1 || cols < 1)
    throw invalid_parameter("make_grid: rows and cols must be >= 1");
  NodeSet nodes;
  nodes.positions.reserve(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      nodes.positions.push_back({(j + 0.5) * area.width / cols,
                                 (i + 0.5) * area.height / rows, 0.0});
  return nodes;
}

/// Time-discretized path. Sample k sits at time k*slot_s; a trajectory with
/// n samples spans n-1 slots of slot_s seconds each.
struct Trajectory {
  std::vector<Point3> positions;
  double slot_s = 1.0;
  std::optional<double> speed_cap_mps;  // checked by validate() when present

  std::size_t sample_count() const { return positions.size(); }
  std::size_t slot_count() const {
    return positions.empty() ? 0 : positions.size() - 1;
  }
  double duration_s() const { return slot_count() * slot_s; }
};

inline void validate(const Trajectory& t) {
  if (!(t.slot_s > 0.0))
    throw invalid_parameter("Trajectory: slot duration must be positive");
  for (const auto& p : t.positions) validate(p);
  if (t.speed_cap_mps) {
    const double limit = *t.speed_cap_mps * t.slot_s + 1e-9;
    for (std::size_t i = 1; i < t.positions.size(); ++i)
      if (horizontal_distance(t.positions[i - 1], t.positions[i]) > limit)
        throw invalid_parameter("Trajectory: slot displacement exceeds speed cap");
  }
}

enum class PathKind { straight, sigmoid, spiral, hover };

inline const char* to_string(PathKind k) {
  switch (k) {
    case PathKind::straight: return "straight";
    case PathKind::sigmoid: return "sigmoid";
    case PathKind::spiral: return "spiral";
    case PathKind::hover: return "hover";
  }
  return "?";
}

namespace detail {

// Logistic steepness for the sigmoid sweep; gives a full visible S-curve
// across a km-scale area.
inline constexpr double kSigmoidSteepness = 0.01;  // 1/m

// Spiral margin kept from the area edge and number of turns flown.
inline constexpr double kSpiralEdgeMargin = 25.0;  // m
inline constexpr double kSpiralTurns = 5.0;

inline double sigmoid_y(const AreaSpec& area, double x) {
  return area.height / (1.0 + std::exp(-kSigmoidSteepness * (x - area.width / 2.0)));
}

// Arc length of r = a*theta from 0 to theta (Archimedean spiral).
inline double spiral_arc_length(double a, double theta) {
  const double s = std::sqrt(1.0 + theta * theta);
  return 0.5 * a * (theta * s + std::asinh(theta));
}

// Piecewise description of a planar path with a monotone arc-length
// parameterization; point_at(s) returns the exact curve point.
struct PathModel {
  double total_length = 0.0;
  std::vector<double> cum_s;  // cumulative arc length at grid params
  std::vector<double> grid;   // parameter grid (x for curves, theta for spiral)
  enum class Kind { line, sigmoid, spiral } kind = Kind::line;
  AreaSpec area;
  double spiral_a = 0.0;

  Point3 point_at(double s, double altitude) const {
    if (kind == Kind::line) {
      const double x = std::clamp(s, 0.0, total_length);
      return {x, area.height / 2.0, altitude};
    }
    if (kind == Kind::spiral) {
      const double theta = invert_spiral(s);
      const double r = spiral_a * theta;
      return {area.width / 2.0 + r * std::cos(theta),
              area.height / 2.0 + r * std::sin(theta), altitude};
    }
    // sigmoid: the table covers [0, width/2]; the second half reuses it via
    // the curve's 180-degree rotation symmetry, so sample pairs (s, S-s) are
    // exact rotations of each other.
    if (s > total_length / 2.0) {
      const Point3 p = point_at(total_length - s, altitude);
      return {area.width - p.x, area.height - p.y, altitude};
    }
    const double half = std::max(0.0, s);
    const auto it = std::lower_bound(cum_s.begin(), cum_s.end(), half);
    double x;
    if (it == cum_s.begin()) {
      x = grid.front();
    } else if (it == cum_s.end()) {
      x = grid.back();
    } else {
      const std::size_t hi = static_cast<std::size_t>(it - cum_s.begin());
      const std::size_t lo = hi - 1;
      const double frac = (half - cum_s[lo]) / (cum_s[hi] - cum_s[lo]);
      x = grid[lo] + frac * (grid[hi] - grid[lo]);
    }
    return {x, sigmoid_y(area, x), altitude};
  }

  double invert_spiral(double s) const {
    double lo = 0.0, hi = kSpiralTurns * 2.0 * M_PI;
    // Extend the bracket if asked for arc beyond the nominal turns.
    while (spiral_arc_length(spiral_a, hi) < s) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (spiral_arc_length(spiral_a, mid) < s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

inline PathModel build_path_model(PathKind kind, const AreaSpec& area) {
  PathModel m;
  m.area = area;
  switch (kind) {
    case PathKind::straight:
      m.kind = PathModel::Kind::line;
      m.total_length = area.width;
      break;
    case PathKind::spiral: {
      m.kind = PathModel::Kind::spiral;
      m.spiral_a = (std::min(area.width, area.height) / 2.0 - kSpiralEdgeMargin) /
                   (kSpiralTurns * 2.0 * M_PI);
      m.total_length = spiral_arc_length(m.spiral_a, kSpiralTurns * 2.0 * M_PI);
      break;
    }
    case PathKind::sigmoid: {
      // tabulate arc length over [0, width/2] only; point_at mirrors the rest
      m.kind = PathModel::Kind::sigmoid;
      const int cells = 20000;
      m.grid.resize(cells + 1);
      m.cum_s.resize(cells + 1);
      m.cum_s[0] = 0.0;
      m.grid[0] = 0.0;
      double prev_y = sigmoid_y(area, 0.0);
      for (int i = 1; i <= cells; ++i) {
        const double x = (area.width / 2.0) * i / cells;
        const double y = sigmoid_y(area, x);
        m.grid[i] = x;
        m.cum_s[i] = m.cum_s[i - 1] + std::hypot(x - m.grid[i - 1], y - prev_y);
        prev_y = y;
      }
      m.total_length = 2.0 * m.cum_s.back();
      break;
    }
    case PathKind::hover:
      m.kind = PathModel::Kind::line;
      m.total_length = 0.0;
      break;
  }
  return m;
}

}  // namespace detail

/// Length of the nominal path flown by each trajectory kind over the area.
inline double path_length(PathKind kind, const AreaSpec& area) {
  return detail::build_path_model(kind, area).total_length;
}

/// Constant-speed, fixed-altitude trajectory sampled at slot boundaries
/// (n slots -> n+1 samples spanning [0, duration]).
///
/// The path is traversed once at an even arc-length spacing chosen so the
/// final path point falls exactly on a sample; any remaining slots hover at
/// the endpoint. Kinds with fixed endpoints (straight, sigmoid) require
/// speed*duration >= path length; a spiral that runs out of time simply
/// stops mid-curve.
inline Trajectory build_trajectory(PathKind kind, const AreaSpec& area,
                                   double altitude_m, double speed_mps,
                                   double duration_s, double slot_s) {
  validate(area);
  if (!(altitude_m >= 0.0))
    throw invalid_parameter("build_trajectory: altitude must be >= 0");
  if (!(duration_s > 0.0))
    throw invalid_parameter("build_trajectory: duration must be positive");
  if (!(slot_s > 0.0))
    throw invalid_parameter("build_trajectory: slot duration must be positive");
  if (kind != PathKind::hover && !(speed_mps > 0.0))
    throw invalid_parameter("build_trajectory: speed must be positive");

  // Round to whole slots; the mismatch is at most half a slot by rounding.
  const auto slots = static_cast<std::int64_t>(std::llround(duration_s / slot_s));
  if (slots < 1)
    throw invalid_parameter("build_trajectory: duration must cover at least one slot");

  Trajectory traj;
  traj.slot_s = slot_s;
  traj.speed_cap_mps = kind == PathKind::hover ? std::optional<double>{} : speed_mps;
  traj.positions.reserve(static_cast<std::size_t>(slots) + 1);

  if (kind == PathKind::hover) {
    const Point3 p = area.center(altitude_m);
    traj.positions.assign(static_cast<std::size_t>(slots) + 1, p);
    return traj;
  }

  const detail::PathModel model = detail::build_path_model(kind, area);
  const double step = speed_mps * slot_s;
  const double reach = speed_mps * slots * slot_s;

  std::int64_t move_slots;
  double spacing;
  if (reach + 1e-9 >= model.total_length) {
    // Path completes; spread it evenly over the fewest slots that respect
    // the speed cap so the endpoint lands exactly on a sample.
    move_slots = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(model.total_length / step - 1e-12)));
    move_slots = std::min(move_slots, slots);
    spacing = model.total_length / static_cast<double>(move_slots);
  } else {
    if (kind != PathKind::spiral)
      throw infeasible_trajectory(
          "build_trajectory: speed*duration shorter than the path for kind " +
          std::string(to_string(kind)));
    move_slots = slots;
    spacing = step;
  }

  for (std::int64_t k = 0; k <= move_slots; ++k)
    traj.positions.push_back(model.point_at(spacing * k, altitude_m));
  for (std::int64_t k = move_slots; k < slots; ++k)
    traj.positions.push_back(traj.positions.back());
  return traj;
}

}  // namespace udn
