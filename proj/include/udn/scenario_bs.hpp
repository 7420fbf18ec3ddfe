#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "udn/channel.hpp"
#include "udn/errors.hpp"
#include "udn/geometry.hpp"
#include "udn/parallel.hpp"
#include "udn/rng.hpp"

namespace udn {

/// Flying base station over the area midpoint serving one ground user while
/// D2D pairs reuse the same spectrum.
struct BsConfig {
  AreaSpec area{1000.0, 1000.0};
  double d2d_density_per_m2 = 1e-5;
  double d2d_max_distance_m = 30.0;
  double sinr_threshold = 3.1622776601683795;  // 5 dB, linear
  double uav_power_max_w = 5.0;
  double d2d_power_max_w = 0.1;
  double height_min_m = 50.0;
  double height_max_m = 1000.0;
  int height_points = 64;
  ChannelParams channel;
  int trials = 100;
  std::uint64_t seed = 1;
  // power solver knobs
  int power_grid_points = 64;
  int max_sweeps = 8;
  double tol = 1e-6;
};

inline void validate(const BsConfig& cfg) {
  validate(cfg.area);
  validate(cfg.channel);
  if (!(cfg.d2d_density_per_m2 >= 0.0))
    throw invalid_parameter("BsConfig: density must be >= 0");
  if (!(cfg.d2d_max_distance_m > 0.0))
    throw invalid_parameter("BsConfig: pair distance cap must be > 0");
  if (!(cfg.sinr_threshold > 0.0))
    throw invalid_parameter("BsConfig: SINR threshold must be > 0");
  if (!(cfg.uav_power_max_w > 0.0) || !(cfg.d2d_power_max_w > 0.0))
    throw invalid_parameter("BsConfig: power caps must be > 0");
  if (!(cfg.height_min_m > 0.0) || !(cfg.height_max_m >= cfg.height_min_m))
    throw invalid_parameter("BsConfig: need 0 < height_min <= height_max");
  if (cfg.height_points < 1) throw invalid_parameter("BsConfig: height_points >= 1");
  if (cfg.trials < 1) throw invalid_parameter("BsConfig: trials >= 1");
}

/// One Monte Carlo draw: pair geometry, the served user, and the block fades
/// of every ground-ground link (held fixed while powers are optimized).
struct BsInstance {
  Point3 uav_ground;  // midpoint; the UAV flies at (x, y, height)
  Point3 user;
  std::vector<std::pair<Point3, Point3>> pairs;  // (tx, rx)
  std::vector<std::vector<double>> fade_dd;      // [rx of pair i][tx of pair j]
  std::vector<double> fade_user;                 // tx of pair j -> user

  std::size_t pair_count() const { return pairs.size(); }
};

inline BsInstance draw_instance(const BsConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  BsInstance inst;
  inst.uav_ground = cfg.area.center();

  const auto k = static_cast<std::size_t>(
      rng.poisson(cfg.d2d_density_per_m2 * cfg.area.width * cfg.area.height));
  inst.pairs.resize(k);
  for (auto& [tx, rx] : inst.pairs)
    tx = {rng.uniform(0.0, cfg.area.width), rng.uniform(0.0, cfg.area.height), 0.0};
  for (auto& [tx, rx] : inst.pairs) {
    // uniform in the disk around the transmitter, with a 1 m near-field
    // guard, clamped into the area (clamping can only shorten the pair)
    const double r = std::max(1.0, cfg.d2d_max_distance_m * std::sqrt(rng.uniform()));
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    rx = {std::clamp(tx.x + r * std::cos(phi), 0.0, cfg.area.width),
          std::clamp(tx.y + r * std::sin(phi), 0.0, cfg.area.height), 0.0};
  }
  inst.user = {rng.uniform(0.0, cfg.area.width), rng.uniform(0.0, cfg.area.height), 0.0};

  inst.fade_dd.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) inst.fade_dd[i][j] = rng.exponential();
  inst.fade_user.resize(k);
  for (std::size_t j = 0; j < k; ++j) inst.fade_user[j] = rng.exponential();
  return inst;
}

namespace bs_detail {

inline double ground_gain(const Point3& tx, const Point3& rx, double fade,
                          const ChannelParams& ch) {
  const double d = std::max(distance(tx, rx), 1e-6);
  return ch.beta0 * std::pow(d, -ch.alpha_d2d) * fade;
}

/// Height-independent ground gains plus the squared horizontal offsets the
/// air links need; everything the power solver touches per candidate is O(K).
struct Geometry {
  double sq_user_offset = 0.0;              // |uav_xy - user_xy|^2
  std::vector<double> sq_rx_offset;         // |uav_xy - rx_i|^2
  std::vector<double> gain_to_user;         // tx_j -> user (faded)
  std::vector<std::vector<double>> gain_dd; // [i][j]: tx_j -> rx_i (faded)

  Geometry(const BsInstance& inst, const BsConfig& cfg) {
    const std::size_t k = inst.pair_count();
    sq_user_offset = squared_distance(inst.uav_ground, inst.user);
    sq_rx_offset.resize(k);
    gain_to_user.resize(k);
    gain_dd.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
      sq_rx_offset[i] = squared_distance(inst.uav_ground, inst.pairs[i].second);
      gain_to_user[i] = ground_gain(inst.pairs[i].first, inst.user,
                                    inst.fade_user[i], cfg.channel);
      for (std::size_t j = 0; j < k; ++j)
        gain_dd[i][j] = ground_gain(inst.pairs[j].first, inst.pairs[i].second,
                                    inst.fade_dd[i][j], cfg.channel);
    }
  }

  double air_gain_user(double height, const ChannelParams& ch) const {
    return ch.beta0 / (height * height + sq_user_offset);
  }
  double air_gain_rx(std::size_t i, double height, const ChannelParams& ch) const {
    return ch.beta0 / (height * height + sq_rx_offset[i]);
  }
};

/// Block-coordinate power solver at a fixed UAV height. The served user's
/// SINR constraint is kept by projecting the UAV power up to the minimum
/// feasible level whenever a D2D update violates it; candidates that would
/// push the UAV past its cap score -inf.
struct PowerSolver {
  const BsConfig& cfg;
  const Geometry& geo;
  double g_user;                // uav -> user at this height
  std::vector<double> g_rx;     // uav -> rx_i at this height
  std::size_t k;

  std::vector<double> p;        // [0] = uav, [1 + i] = pair i
  double int_user = 0.0;        // d2d interference at the user
  std::vector<double> int_rx;   // interference at rx_i (uav + other pairs)

  PowerSolver(const BsConfig& config, const Geometry& geometry, double height)
      : cfg(config), geo(geometry), k(geometry.sq_rx_offset.size()) {
    g_user = geo.air_gain_user(height, cfg.channel);
    g_rx.resize(k);
    for (std::size_t i = 0; i < k; ++i)
      g_rx[i] = geo.air_gain_rx(i, height, cfg.channel);
  }

  // tiny headroom so a projected power stays feasible under re-computation
  double min_uav_power(double interference_at_user) const {
    return cfg.sinr_threshold * (cfg.channel.noise_power_w + interference_at_user) *
           (1.0 + 1e-12) / g_user;
  }

  void load(std::span<const double> powers) {
    p.assign(powers.begin(), powers.end());
    rebuild_accumulators();
  }

  void rebuild_accumulators() {
    int_user = 0.0;
    int_rx.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) int_user += p[1 + j] * geo.gain_to_user[j];
    for (std::size_t i = 0; i < k; ++i) {
      int_rx[i] = p[0] * g_rx[i];
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) int_rx[i] += p[1 + j] * geo.gain_dd[i][j];
    }
  }

  double objective() const {
    double sum = spectral_efficiency(
        p[0] * g_user / (cfg.channel.noise_power_w + int_user));
    for (std::size_t i = 0; i < k; ++i)
      sum += spectral_efficiency(p[1 + i] * geo.gain_dd[i][i] /
                                 (cfg.channel.noise_power_w + int_rx[i]));
    return sum;
  }

  // objective if the uav power moved to q, others fixed
  double objective_uav(double q) const {
    double sum = spectral_efficiency(q * g_user /
                                     (cfg.channel.noise_power_w + int_user));
    for (std::size_t i = 0; i < k; ++i) {
      const double interference = int_rx[i] + (q - p[0]) * g_rx[i];
      sum += spectral_efficiency(p[1 + i] * geo.gain_dd[i][i] /
                                 (cfg.channel.noise_power_w + interference));
    }
    return sum;
  }

  // objective if pair `idx` moved to q, with the uav projected to stay
  // feasible; -inf when no feasible uav power exists
  double objective_pair(std::size_t idx, double q, double* uav_out = nullptr) const {
    const double d_int_user = (q - p[1 + idx]) * geo.gain_to_user[idx];
    const double new_int_user = int_user + d_int_user;
    double uav = p[0];
    const double need = min_uav_power(new_int_user);
    if (uav < need) uav = need;
    if (uav > cfg.uav_power_max_w + 1e-12)
      return -std::numeric_limits<double>::infinity();
    if (uav_out) *uav_out = uav;

    double sum = spectral_efficiency(uav * g_user /
                                     (cfg.channel.noise_power_w + new_int_user));
    for (std::size_t i = 0; i < k; ++i) {
      double interference = int_rx[i] + (uav - p[0]) * g_rx[i];
      if (i != idx) interference += (q - p[1 + idx]) * geo.gain_dd[i][idx];
      const double own = i == idx ? q : p[1 + i];
      sum += spectral_efficiency(own * geo.gain_dd[i][i] /
                                 (cfg.channel.noise_power_w + interference));
    }
    return sum;
  }

  void commit_uav(double q) {
    for (std::size_t i = 0; i < k; ++i) int_rx[i] += (q - p[0]) * g_rx[i];
    p[0] = q;
  }

  void commit_pair(std::size_t idx, double q, double uav) {
    int_user += (q - p[1 + idx]) * geo.gain_to_user[idx];
    for (std::size_t i = 0; i < k; ++i)
      if (i != idx) int_rx[i] += (q - p[1 + idx]) * geo.gain_dd[i][idx];
    p[1 + idx] = q;
    commit_uav(uav);
  }

  // best candidate on a grid + golden refinement; deterministic
  template <typename F>
  static double solve_1d(F&& f, double lo, double hi, int grid_points) {
    double best_x = lo, best_v = f(lo);
    const double h = (hi - lo) / (grid_points - 1);
    int best_i = 0;
    for (int i = 1; i < grid_points; ++i) {
      const double x = lo + h * i;
      const double v = f(x);
      if (v > best_v) {
        best_v = v;
        best_x = x;
        best_i = i;
      }
    }
    if (!(hi > lo)) return lo;
    // golden refinement inside the winning cell's neighborhood
    double a = std::max(lo, lo + h * (best_i - 1));
    double b = std::min(hi, lo + h * (best_i + 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-9 * std::max(1.0, hi)) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2; x2 = a + inv_phi * (b - a); f2 = f(x2);
      } else {
        b = x2; x2 = x1; f2 = f1; x1 = b - inv_phi * (b - a); f1 = f(x1);
      }
    }
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    return fm > best_v ? mid : best_x;
  }

  // One full sweep: UAV first, then pairs by index. Returns the objective.
  double sweep() {
    rebuild_accumulators();  // shed incremental drift
    const double uav_floor = min_uav_power(int_user);
    if (uav_floor <= cfg.uav_power_max_w) {
      const double q = solve_1d([&](double x) { return objective_uav(x); },
                                std::min(uav_floor, cfg.uav_power_max_w),
                                cfg.uav_power_max_w, cfg.power_grid_points);
      commit_uav(q);
    }
    for (std::size_t idx = 0; idx < k; ++idx) {
      const double q = solve_1d(
          [&](double x) { return objective_pair(idx, x); }, 0.0,
          cfg.d2d_power_max_w, cfg.power_grid_points);
      double uav = p[0];
      const double v = objective_pair(idx, q, &uav);
      if (std::isfinite(v)) commit_pair(idx, q, uav);
    }
    return objective();
  }
};

struct SolveOutcome {
  bool feasible = false;
  double tput = 0.0;
  std::vector<double> powers;
};

/// Optimizes all powers at one height. Infeasible iff even the interference-
/// free instance cannot meet the user's SINR target at this height.
inline SolveOutcome solve_at_height(const BsConfig& cfg, const Geometry& geo,
                                    double height) {
  PowerSolver solver(cfg, geo, height);
  const std::size_t k = solver.k;
  SolveOutcome out;
  if (solver.min_uav_power(0.0) > cfg.uav_power_max_w) return out;  // outage

  std::vector<std::vector<double>> starts;
  {
    std::vector<double> zeros(k + 1, 0.0);
    zeros[0] = std::min(solver.min_uav_power(0.0), cfg.uav_power_max_w);
    starts.push_back(std::move(zeros));
  }
  {
    std::vector<double> caps(k + 1, cfg.d2d_power_max_w);
    caps[0] = cfg.uav_power_max_w;
    PowerSolver probe(cfg, geo, height);
    probe.load(caps);
    if (probe.min_uav_power(probe.int_user) <= cfg.uav_power_max_w)
      starts.push_back(std::move(caps));
  }

  for (const auto& start : starts) {
    solver.load(start);
    double value = solver.objective();
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      const double next = solver.sweep();
      const bool done = next - value < cfg.tol;
      value = next;
      if (done) break;
    }
    if (!out.feasible || value > out.tput) {
      out.feasible = true;
      out.tput = value;
      out.powers = solver.p;
    }
  }
  return out;
}

}  // namespace bs_detail

struct BsEvaluation {
  double sum_tput = 0.0;
  bool feasible = false;  // served user's SINR meets the threshold
};

/// Sum spectral efficiency of the UAV-user link and every D2D pair at the
/// given UAV height and power vector (powers[0] = UAV, powers[1 + i] = pair i).
inline BsEvaluation sum_throughput(const BsInstance& inst, double height_m,
                                   std::span<const double> powers,
                                   const BsConfig& cfg) {
  validate(cfg);
  const std::size_t k = inst.pair_count();
  if (powers.size() != k + 1)
    throw invalid_parameter("sum_throughput: need one power per link (UAV first)");
  if (!(powers[0] >= 0.0) || powers[0] > cfg.uav_power_max_w + 1e-12)
    throw invalid_parameter("sum_throughput: UAV power outside [0, cap]");
  for (std::size_t i = 0; i < k; ++i)
    if (!(powers[1 + i] >= 0.0) || powers[1 + i] > cfg.d2d_power_max_w + 1e-12)
      throw invalid_parameter("sum_throughput: D2D power outside [0, cap]");
  if (!(height_m > 0.0)) throw invalid_parameter("sum_throughput: height must be > 0");

  const bs_detail::Geometry geo(inst, cfg);
  bs_detail::PowerSolver state(cfg, geo, height_m);
  state.load(powers);
  const double user_sinr =
      powers[0] * state.g_user / (cfg.channel.noise_power_w + state.int_user);
  return {state.objective(), user_sinr >= cfg.sinr_threshold};
}

struct BsOptimum {
  bool feasible = false;
  double height_m = 0.0;
  double tput = 0.0;
  std::vector<double> powers;
};

inline std::vector<double> height_lattice(const BsConfig& cfg) {
  std::vector<double> hs(cfg.height_points);
  if (cfg.height_points == 1) {
    hs[0] = cfg.height_min_m;
    return hs;
  }
  for (int i = 0; i < cfg.height_points; ++i)
    hs[i] = cfg.height_min_m + (cfg.height_max_m - cfg.height_min_m) * i /
                                   (cfg.height_points - 1);
  return hs;
}

/// Joint height and power optimization: an outer sweep over the height
/// lattice with the block-coordinate power solver at each level. Heights
/// where even the lone UAV cannot meet the user's SINR target are discarded;
/// if none remain the result is an infeasibility report, not an error.
inline BsOptimum optimize_bs(const BsInstance& inst, const BsConfig& cfg) {
  validate(cfg);
  const bs_detail::Geometry geo(inst, cfg);
  BsOptimum best;
  for (double h : height_lattice(cfg)) {
    const bs_detail::SolveOutcome out = bs_detail::solve_at_height(cfg, geo, h);
    if (out.feasible && (!best.feasible || out.tput > best.tput)) {
      best.feasible = true;
      best.height_m = h;
      best.tput = out.tput;
      best.powers = out.powers;
    }
  }
  return best;
}

struct BsHeightRow {
  double lambda = 0.0;
  double height_m = 0.0;
  double mean_tput = 0.0;
  double stderr_tput = 0.0;
  double outage_frac = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo height sweep: per density, draws `trials` instances and
/// power-optimizes each at every height on the lattice. Infeasible
/// (height, trial) combinations count as outage and contribute zero
/// throughput to the mean. Trials parallelize; aggregation is ordered.
inline std::vector<BsHeightRow> sweep_heights(const BsConfig& cfg,
                                              std::span<const double> lambdas,
                                              int jobs = 1) {
  validate(cfg);
  std::vector<BsHeightRow> rows;
  const std::vector<double> hs = height_lattice(cfg);
  for (double lambda : lambdas) {
    BsConfig c = cfg;
    c.d2d_density_per_m2 = lambda;
    validate(c);
    std::vector<std::vector<double>> tput(c.trials);   // [trial][height]
    std::vector<std::vector<bool>> feasible(c.trials);
    parallel_for(static_cast<std::size_t>(c.trials), jobs, [&](std::size_t t) {
      const BsInstance inst = draw_instance(c, derive_seed(c.seed, t));
      const bs_detail::Geometry geo(inst, c);
      tput[t].resize(hs.size());
      feasible[t].resize(hs.size());
      for (std::size_t hi = 0; hi < hs.size(); ++hi) {
        const bs_detail::SolveOutcome out = bs_detail::solve_at_height(c, geo, hs[hi]);
        tput[t][hi] = out.feasible ? out.tput : 0.0;
        feasible[t][hi] = out.feasible;
      }
    });
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      BsHeightRow row;
      row.lambda = lambda;
      row.height_m = hs[hi];
      row.trials = c.trials;
      row.seed = c.seed;
      double sum = 0.0, sum2 = 0.0;
      int outages = 0;
      for (int t = 0; t < c.trials; ++t) {
        sum += tput[t][hi];
        sum2 += tput[t][hi] * tput[t][hi];
        if (!feasible[t][hi]) ++outages;
      }
      row.mean_tput = sum / c.trials;
      if (c.trials > 1) {
        const double var =
            std::max(0.0, (sum2 - sum * sum / c.trials) / (c.trials - 1));
        row.stderr_tput = std::sqrt(var / c.trials);
      }
      row.outage_frac = static_cast<double>(outages) / c.trials;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace udn
