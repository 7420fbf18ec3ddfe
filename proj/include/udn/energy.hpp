#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "udn/channel.hpp"
#include "udn/errors.hpp"
#include "udn/geometry.hpp"

namespace udn {

/// Level-flight propulsion power law P(V) = c1*V^3 + c2/V.
struct PropulsionParams {
  double c1 = 9.26e-4;  // W s^3 / m^3
  double c2 = 2250.0;   // W m / s
};

inline void validate(const PropulsionParams& p) {
  if (!(p.c1 > 0.0) || !(p.c2 > 0.0))
    throw invalid_parameter("PropulsionParams: c1 and c2 must be positive");
}

struct HarvestParams {
  double eta = 0.5;  // RF harvesting efficiency in [0, 1]
};

inline void validate(const HarvestParams& p) {
  if (!(p.eta >= 0.0) || !(p.eta <= 1.0))
    throw invalid_parameter("HarvestParams: eta must lie in [0, 1]");
}

inline double propulsion_power(double speed_mps, const PropulsionParams& p) {
  validate(p);
  if (!(speed_mps > 0.0))
    throw invalid_parameter("propulsion_power: undefined for speed <= 0");
  return p.c1 * speed_mps * speed_mps * speed_mps + p.c2 / speed_mps;
}

/// Speed minimizing P(V): the max-endurance operating point (c2 / 3c1)^(1/4).
inline double max_endurance_speed(const PropulsionParams& p) {
  validate(p);
  return std::pow(p.c2 / (3.0 * p.c1), 0.25);
}

/// Total propulsion energy of a sampled trajectory: each slot is charged at
/// the power of its traversal speed. Slots with no displacement are charged
/// at the max-endurance power, standing in for tight loitering (the
/// fixed-wing model has no hover point).
inline double flight_energy(const Trajectory& traj, const PropulsionParams& p) {
  validate(p);
  if (traj.sample_count() < 2)
    throw invalid_parameter("flight_energy: trajectory needs at least 2 samples");
  const double loiter_power = propulsion_power(max_endurance_speed(p), p);
  double energy = 0.0;
  for (std::size_t n = 0; n + 1 < traj.sample_count(); ++n) {
    const double v = distance(traj.positions[n], traj.positions[n + 1]) / traj.slot_s;
    energy += (v > 0.0 ? propulsion_power(v, p) : loiter_power) * traj.slot_s;
  }
  return energy;
}

/// RF energy harvested by each node over the trajectory. Slot n radiates
/// p[n] watts from the slot's chord midpoint; node k collects
/// eta * p[n] * los_gain * slot_s. Linear in the schedule.
inline std::vector<double> harvested_energy(const Trajectory& traj,
                                            std::span<const double> schedule_w,
                                            const NodeSet& nodes,
                                            const ChannelParams& channel,
                                            const HarvestParams& harvest) {
  validate(channel);
  validate(harvest);
  if (schedule_w.size() != traj.slot_count())
    throw invalid_parameter("harvested_energy: schedule length must equal the slot count");
  std::vector<double> energy(nodes.size(), 0.0);
  for (std::size_t n = 0; n < traj.slot_count(); ++n) {
    if (!(schedule_w[n] >= 0.0))
      throw invalid_parameter("harvested_energy: negative transmit power");
    if (schedule_w[n] == 0.0) continue;
    const Point3& a = traj.positions[n];
    const Point3& b = traj.positions[n + 1];
    const Point3 mid{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0, (a.z + b.z) / 2.0};
    const double slot_factor = harvest.eta * schedule_w[n] * traj.slot_s;
    for (std::size_t k = 0; k < nodes.size(); ++k)
      energy[k] += slot_factor * los_gain(mid, nodes.positions[k], channel);
  }
  return energy;
}

}  // namespace udn
