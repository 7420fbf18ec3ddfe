#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "udn/channel.hpp"
#include "udn/energy.hpp"
#include "udn/errors.hpp"
#include "udn/geometry.hpp"

namespace udn {

/// Full-duplex mobile relay between a source at x = 0 and a destination at
/// x = separation, flying at fixed altitude on the line between them.
struct RelayConfig {
  double separation_m = 2000.0;
  double altitude_m = 100.0;
  double horizon_s = 200.0;
  double speed_max_mps = 40.0;  // >= 0; 0 degenerates to a static relay
  int slots = 100;
  int lattice_points = 101;  // trajectory search positions over [0, separation]
  double source_power_max_w = 5.0;
  double relay_power_max_w = 5.0;
  ChannelParams channel;
  PropulsionParams propulsion;
  int improvement_rounds = 4;
  int polish_passes = 8;
  double tol = 1e-9;

  double slot_s() const { return horizon_s / slots; }
};

inline void validate(const RelayConfig& cfg) {
  if (!(cfg.separation_m > 0.0) || !(cfg.altitude_m > 0.0) || !(cfg.horizon_s > 0.0))
    throw invalid_parameter("RelayConfig: separation, altitude, horizon must be positive");
  if (!(cfg.speed_max_mps >= 0.0))
    throw invalid_parameter("RelayConfig: speed cap must be >= 0");
  if (cfg.slots < 2) throw invalid_parameter("RelayConfig: need at least 2 slots");
  if (cfg.lattice_points < 2)
    throw invalid_parameter("RelayConfig: need at least 2 lattice points");
  if (!(cfg.source_power_max_w > 0.0) || !(cfg.relay_power_max_w > 0.0))
    throw invalid_parameter("RelayConfig: power caps must be positive");
  validate(cfg.channel);
  validate(cfg.propulsion);
}

/// Per-slot relay schedule: horizontal position on the source-destination
/// line plus source and relay transmit powers.
struct RelayPlan {
  std::vector<double> x;        // m from the source
  std::vector<double> p_src;    // W
  std::vector<double> p_relay;  // W
};

inline void validate(const RelayPlan& plan, const RelayConfig& cfg) {
  const std::size_t n = plan.x.size();
  if (n != static_cast<std::size_t>(cfg.slots) || plan.p_src.size() != n ||
      plan.p_relay.size() != n)
    throw invalid_parameter("RelayPlan: vectors must have one entry per slot");
  const double step_limit = cfg.speed_max_mps * cfg.slot_s() + 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(plan.p_src[i] >= 0.0) || plan.p_src[i] > cfg.source_power_max_w + 1e-12)
      throw invalid_parameter("RelayPlan: source power outside [0, cap]");
    if (!(plan.p_relay[i] >= 0.0) || plan.p_relay[i] > cfg.relay_power_max_w + 1e-12)
      throw invalid_parameter("RelayPlan: relay power outside [0, cap]");
    if (i > 0 && std::abs(plan.x[i] - plan.x[i - 1]) > step_limit)
      throw invalid_parameter("RelayPlan: slot displacement exceeds speed cap");
  }
}

namespace relay_detail {

inline double hop_rate(double horizontal_m, double power_w, double altitude_m,
                       const ChannelParams& ch) {
  const double d2 = altitude_m * altitude_m + horizontal_m * horizontal_m;
  return spectral_efficiency(power_w * ch.beta0 / (ch.noise_power_w * d2));
}

inline double invert_hop_rate(double rate, double horizontal_m, double altitude_m,
                              const ChannelParams& ch) {
  const double d2 = altitude_m * altitude_m + horizontal_m * horizontal_m;
  return (std::exp2(rate) - 1.0) * ch.noise_power_w * d2 / ch.beta0;
}

// Greedy store-and-forward delivery: each slot forwards as much previously
// received data as the relay-destination link can carry. Maximal by an
// exchange argument (forwarding earlier never blocks later slots).
inline double greedy_delivered(std::span<const double> arrivals,
                               std::span<const double> caps,
                               std::vector<double>* per_slot = nullptr) {
  double backlog = 0.0, total = 0.0;
  if (per_slot) per_slot->assign(arrivals.size(), 0.0);
  for (std::size_t n = 0; n < arrivals.size(); ++n) {
    const double d = std::min(caps[n], backlog);
    total += d;
    backlog += arrivals[n] - d;
    if (per_slot) (*per_slot)[n] = d;
  }
  return total;
}

}  // namespace relay_detail

/// Per-slot source-relay and relay-destination spectral efficiencies for the
/// plan's positions and powers.
inline std::pair<std::vector<double>, std::vector<double>> relay_rates(
    const RelayPlan& plan, const RelayConfig& cfg) {
  validate(cfg);
  validate(plan, cfg);
  std::vector<double> r_sr(plan.x.size()), r_rd(plan.x.size());
  for (std::size_t n = 0; n < plan.x.size(); ++n) {
    r_sr[n] = relay_detail::hop_rate(plan.x[n], plan.p_src[n], cfg.altitude_m,
                                     cfg.channel);
    r_rd[n] = relay_detail::hop_rate(cfg.separation_m - plan.x[n], plan.p_relay[n],
                                     cfg.altitude_m, cfg.channel);
  }
  return {std::move(r_sr), std::move(r_rd)};
}

/// Average per-slot delivered rate of a plan. Rejects plans that forward
/// data before it has been received (one-slot processing delay), naming the
/// first violating slot.
inline double throughput(const RelayPlan& plan, const RelayConfig& cfg) {
  const auto [r_sr, r_rd] = relay_rates(plan, cfg);
  double received = 0.0, forwarded = 0.0;
  for (std::size_t n = 0; n < r_rd.size(); ++n) {
    forwarded += r_rd[n];
    if (forwarded > received + 1e-9)
      throw infeasible_plan(
          "RelayPlan: slot " + std::to_string(n) + " forwards un-received data",
          static_cast<int>(n));
    received += r_sr[n];
  }
  return forwarded / static_cast<double>(r_rd.size());
}

struct RelayResult {
  RelayPlan plan;
  double throughput = 0.0;
  std::vector<double> trace;  // objective after initialization and each round
};

namespace relay_detail {

struct Instance {
  const RelayConfig* cfg;
  std::vector<double> lattice;       // candidate positions
  std::vector<double> arrival_at;    // a(x_j): source rate at full power
  std::vector<double> cap_at;        // c(x_j): relay rate at full power
  int window = 0;                    // max lattice steps per slot

  explicit Instance(const RelayConfig& c) : cfg(&c) {
    const int points = c.lattice_points;
    lattice.resize(points);
    arrival_at.resize(points);
    cap_at.resize(points);
    const double step = c.separation_m / (points - 1);
    for (int j = 0; j < points; ++j) {
      lattice[j] = step * j;
      arrival_at[j] = hop_rate(lattice[j], c.source_power_max_w, c.altitude_m, c.channel);
      cap_at[j] = hop_rate(c.separation_m - lattice[j], c.relay_power_max_w,
                           c.altitude_m, c.channel);
    }
    window = static_cast<int>((c.speed_max_mps * c.slot_s() + 1e-9) / step);
    window = std::min(window, points - 1);
  }

  double objective_of_path(std::span<const int> path) const {
    const std::size_t n = path.size();
    double backlog = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::min(cap_at[path[i]], backlog);
      total += d;
      backlog += arrival_at[path[i]] - d;
    }
    return total / static_cast<double>(n);
  }

  // objective with one slot's position overridden; used by the polish pass
  double objective_with_override(std::span<const int> path, std::size_t slot,
                                 int lattice_idx) const {
    double backlog = 0.0, total = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const int j = i == slot ? lattice_idx : path[i];
      const double d = std::min(cap_at[j], backlog);
      total += d;
      backlog += arrival_at[j] - d;
    }
    return total / static_cast<double>(path.size());
  }

  // Forward DP maximizing a split surrogate: slots before the split earn the
  // arrival rate, slots after it earn the delivery cap, the split slot earns
  // nothing. split == -1 scores every slot with its cap.
  std::vector<int> best_path_for_split(int split) const {
    const int n = cfg->slots;
    const int points = static_cast<int>(lattice.size());
    std::vector<double> value(points), prev(points);
    std::vector<std::vector<int>> parent(n, std::vector<int>(points, 0));
    auto reward = [&](int slot, int j) {
      if (slot == split) return 0.0;
      return slot < split ? arrival_at[j] : cap_at[j];
    };
    for (int j = 0; j < points; ++j) prev[j] = reward(0, j);
    for (int slot = 1; slot < n; ++slot) {
      for (int j = 0; j < points; ++j) {
        const int lo = std::max(0, j - window), hi = std::min(points - 1, j + window);
        int best_j = lo;
        double best_v = prev[lo];
        for (int k = lo + 1; k <= hi; ++k)
          if (prev[k] > best_v) {
            best_v = prev[k];
            best_j = k;
          }
        value[j] = reward(slot, j) + best_v;
        parent[slot][j] = best_j;
      }
      std::swap(value, prev);
    }
    int end = 0;
    for (int j = 1; j < points; ++j)
      if (prev[j] > prev[end]) end = j;
    std::vector<int> path(n);
    path[n - 1] = end;
    for (int slot = n - 1; slot > 0; --slot)
      path[slot - 1] = parent[slot][path[slot]];
    return path;
  }

  // Slot where the greedy buffer bottlenecks; a good extra split candidate.
  int bottleneck_slot(std::span<const int> path) const {
    const int n = static_cast<int>(path.size());
    std::vector<double> suffix_caps(n + 1, 0.0);
    for (int i = n - 1; i >= 0; --i)
      suffix_caps[i] = suffix_caps[i + 1] + cap_at[path[i]];
    double prefix_arrivals = 0.0, best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int s = 0; s < n; ++s) {
      const double f = prefix_arrivals + suffix_caps[s + 1];
      if (f < best) {
        best = f;
        arg = s;
      }
      prefix_arrivals += arrival_at[path[s]];
    }
    return arg;
  }

  std::vector<int> candidate_splits(std::span<const int> current) const {
    std::vector<int> splits{-1};
    const int n = cfg->slots;
    if (n <= 32) {
      for (int s = 0; s < n; ++s) splits.push_back(s);
    } else {
      for (int i = 0; i <= 16; ++i)
        splits.push_back(std::min(n - 1, i * (n - 1) / 16));
      splits.push_back(bottleneck_slot(current));
      std::sort(splits.begin(), splits.end());
      splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
    }
    return splits;
  }

  // Coordinate improvement on the true objective, one slot at a time.
  bool polish(std::vector<int>& path, double& value) const {
    bool improved_any = false;
    for (int pass = 0; pass < cfg->polish_passes; ++pass) {
      bool improved = false;
      for (std::size_t slot = 0; slot < path.size(); ++slot) {
        const int points = static_cast<int>(lattice.size());
        int lo = 0, hi = points - 1;
        if (slot > 0) {
          lo = std::max(lo, path[slot - 1] - window);
          hi = std::min(hi, path[slot - 1] + window);
        }
        if (slot + 1 < path.size()) {
          lo = std::max(lo, path[slot + 1] - window);
          hi = std::min(hi, path[slot + 1] + window);
        }
        int best_j = path[slot];
        double best_v = value;
        for (int j = lo; j <= hi; ++j) {
          if (j == path[slot]) continue;
          const double v = objective_with_override(path, slot, j);
          if (v > best_v + 1e-12) {
            best_v = v;
            best_j = j;
          }
        }
        if (best_j != path[slot]) {
          path[slot] = best_j;
          value = best_v;
          improved = true;
          improved_any = true;
        }
      }
      if (!improved) break;
    }
    return improved_any;
  }

  // Exact search over all speed-feasible lattice paths; only viable when
  // points^slots is tiny.
  bool exhaustive_path_search(std::vector<int>& path, double& value) const {
    const int points = static_cast<int>(lattice.size());
    const int n = cfg->slots;
    if (n * std::log2(static_cast<double>(points)) > 18.0) return false;
    std::vector<int> probe(n, 0);
    bool improved = false;
    for (;;) {
      bool feasible = true;
      for (int i = 1; i < n && feasible; ++i)
        feasible = std::abs(probe[i] - probe[i - 1]) <= window;
      if (feasible) {
        const double v = objective_of_path(probe);
        if (v > value + 1e-12) {
          value = v;
          path = probe;
          improved = true;
        }
      }
      int carry = n;
      while (carry > 0) {
        if (++probe[carry - 1] < points) break;
        probe[carry - 1] = 0;
        --carry;
      }
      if (carry == 0) break;
    }
    return improved;
  }

  RelayPlan plan_from_positions(std::span<const double> xs) const {
    const auto n = xs.size();
    RelayPlan plan;
    plan.x.assign(xs.begin(), xs.end());
    plan.p_src.assign(n, cfg->source_power_max_w);
    plan.p_relay.assign(n, 0.0);
    std::vector<double> arrivals(n), caps(n), delivered;
    for (std::size_t i = 0; i < n; ++i) {
      arrivals[i] = hop_rate(xs[i], cfg->source_power_max_w, cfg->altitude_m, cfg->channel);
      caps[i] = hop_rate(cfg->separation_m - xs[i], cfg->relay_power_max_w,
                         cfg->altitude_m, cfg->channel);
    }
    greedy_delivered(arrivals, caps, &delivered);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = invert_hop_rate(delivered[i], cfg->separation_m - xs[i],
                                       cfg->altitude_m, cfg->channel);
      plan.p_relay[i] = std::clamp(p, 0.0, cfg->relay_power_max_w);
    }
    return plan;
  }
};

}  // namespace relay_detail

/// Benchmark: relay pinned at the midpoint, powers still optimized under the
/// store-and-forward constraint.
inline RelayResult static_baseline(const RelayConfig& cfg) {
  validate(cfg);
  relay_detail::Instance inst(cfg);
  const std::vector<double> xs(cfg.slots, cfg.separation_m / 2.0);
  RelayResult result;
  result.plan = inst.plan_from_positions(xs);
  result.throughput = throughput(result.plan, cfg);
  result.trace = {result.throughput};
  return result;
}

/// Joint power/trajectory ascent. Alternates a trajectory block (forward
/// dynamic programming over the position lattice, one run per split
/// candidate) with the power block (source at the cap; relay power set to
/// exactly carry the greedily projected backlog). Starts from the static
/// midpoint plan, so the result never falls below the baseline; the trace is
/// non-decreasing by construction.
inline RelayResult optimize_relay(const RelayConfig& cfg) {
  validate(cfg);
  relay_detail::Instance inst(cfg);

  // start from the nearest lattice column to the midpoint
  const int mid = static_cast<int>(
      std::llround((cfg.lattice_points - 1) / 2.0));
  std::vector<int> best_path(cfg.slots, mid);
  double best_value = inst.objective_of_path(best_path);

  const double static_value = static_baseline(cfg).throughput;
  RelayResult result;
  result.trace.push_back(std::max(static_value, best_value));

  if (inst.exhaustive_path_search(best_path, best_value)) {
    result.trace.push_back(std::max(static_value, best_value));
  } else {
    for (int round = 0; round < cfg.improvement_rounds; ++round) {
      double round_start = best_value;
      for (int split : inst.candidate_splits(best_path)) {
        std::vector<int> candidate = inst.best_path_for_split(split);
        const double v = inst.objective_of_path(candidate);
        if (v > best_value + 1e-12) {
          best_value = v;
          best_path = std::move(candidate);
        }
      }
      inst.polish(best_path, best_value);
      result.trace.push_back(std::max(static_value, best_value));
      if (best_value - round_start < cfg.tol) break;
    }
  }

  if (best_value > static_value) {
    std::vector<double> xs(best_path.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = inst.lattice[best_path[i]];
    result.plan = inst.plan_from_positions(xs);
  } else {
    result.plan = inst.plan_from_positions(
        std::vector<double>(cfg.slots, cfg.separation_m / 2.0));
  }
  result.throughput = throughput(result.plan, cfg);
  return result;
}

/// Propulsion energy of the plan's trajectory. The final slot is charged at
/// its entry speed (a continuation sample is appended), so a constant-speed
/// plan costs exactly P(V) * horizon.
inline double plan_flight_energy(const RelayPlan& plan, const RelayConfig& cfg) {
  validate(cfg);
  validate(plan, cfg);
  Trajectory traj;
  traj.slot_s = cfg.slot_s();
  traj.positions.reserve(plan.x.size() + 1);
  for (double x : plan.x) traj.positions.push_back({x, 0.0, cfg.altitude_m});
  const std::size_t n = plan.x.size();
  const double last = n >= 2 ? plan.x[n - 1] + (plan.x[n - 1] - plan.x[n - 2])
                             : plan.x[n - 1];
  traj.positions.push_back({last, 0.0, cfg.altitude_m});
  return flight_energy(traj, cfg.propulsion);
}

/// Delivered bits per Joule of propulsion energy.
inline double energy_efficiency(const RelayPlan& plan, const RelayConfig& cfg) {
  const double tput = throughput(plan, cfg);  // validates the plan
  return cfg.horizon_s * tput * cfg.channel.bandwidth_hz /
         plan_flight_energy(plan, cfg);
}

}  // namespace udn
