#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "udn/channel.hpp"
#include "udn/errors.hpp"
#include "udn/geometry.hpp"
#include "udn/rng.hpp"

namespace udn {

enum class Popularity { uniform, zipf };
enum class CachePolicy { tracking, static_center };
enum class MobilityKind { waypoint, cluster };
enum class Tier { self_hit, d2d, uav, bs };

inline const char* to_string(CachePolicy p) {
  return p == CachePolicy::tracking ? "tracking" : "static";
}
inline const char* to_string(Tier t) {
  switch (t) {
    case Tier::self_hit: return "self";
    case Tier::d2d: return "d2d";
    case Tier::uav: return "uav";
    case Tier::bs: return "bs";
  }
  return "?";
}

/// Two-phase caching: users store one random content each, then requests are
/// served from the cheapest available tier (own cache, a D2D neighbor, the
/// UAV cache, or the macro BS fallback).
struct CacheConfig {
  int users = 1000;
  int contents = 10;
  Popularity popularity = Popularity::zipf;
  double zipf_s = 1.0;
  double d2d_radius_m = 100.0;
  AreaSpec area{1000.0, 1000.0};
  double uav_altitude_m = 100.0;
  double uav_speed_mps = 10.0;
  MobilityKind mobility = MobilityKind::cluster;
  double user_speed_min_mps = 1.0;
  double user_speed_max_mps = 2.0;
  double pause_s = 5.0;
  double cluster_sigma_m = 50.0;
  double cluster_speed_mps = 2.0;
  double duration_s = 600.0;
  double tick_s = 1.0;
  double request_rate_hz = 1.0 / 60.0;  // per user
  // delivery model
  double d2d_power_w = 0.1;
  double uav_power_w = 5.0;
  double delay_d2d_base_s = 0.01;
  double delay_uav_base_s = 0.02;
  double delay_bs_s = 0.2;
  double payload_bits = 1e7;
  double fade_floor = 0.05;  // lower bound on the exponential fade
  int uav_top_k = 1;
  // Delivery link budget. The floor-faded D2D link stays faster than the
  // UAV tier out to ~300 m with these constants, so the strict tier order
  // below also makes mean delay monotone in the D2D radius.
  ChannelParams channel{1e-6, 3.0, 1e-17, 2e8};
};

inline void validate(const CacheConfig& cfg) {
  validate(cfg.area);
  validate(cfg.channel);
  if (cfg.users < 1) throw invalid_parameter("CacheConfig: users must be >= 1");
  if (cfg.contents < 1) throw invalid_parameter("CacheConfig: contents must be >= 1");
  if (!(cfg.zipf_s >= 0.0)) throw invalid_parameter("CacheConfig: zipf_s must be >= 0");
  if (!(cfg.d2d_radius_m >= 0.0))
    throw invalid_parameter("CacheConfig: d2d_radius must be >= 0");
  if (!(cfg.uav_altitude_m > 0.0))
    throw invalid_parameter("CacheConfig: UAV altitude must be > 0");
  if (!(cfg.uav_speed_mps >= 0.0))
    throw invalid_parameter("CacheConfig: UAV speed must be >= 0");
  if (!(cfg.user_speed_min_mps > 0.0) ||
      !(cfg.user_speed_max_mps >= cfg.user_speed_min_mps))
    throw invalid_parameter("CacheConfig: need 0 < speed_min <= speed_max");
  if (!(cfg.pause_s >= 0.0)) throw invalid_parameter("CacheConfig: pause must be >= 0");
  if (!(cfg.duration_s > 0.0) || !(cfg.tick_s > 0.0))
    throw invalid_parameter("CacheConfig: duration and tick must be > 0");
  if (!(cfg.request_rate_hz >= 0.0))
    throw invalid_parameter("CacheConfig: request rate must be >= 0");
  if (!(cfg.payload_bits >= 0.0))
    throw invalid_parameter("CacheConfig: payload must be >= 0");
  if (!(cfg.fade_floor >= 0.0))
    throw invalid_parameter("CacheConfig: fade floor must be >= 0");
  if (cfg.uav_top_k < 0) throw invalid_parameter("CacheConfig: uav_top_k must be >= 0");
}

/// Placement phase: every user independently caches one content, uniform
/// over {0..contents-1}. Deterministic in the seed.
inline std::vector<int> placement_phase(const CacheConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(derive_seed(seed, 0xCACE));
  std::vector<int> cache(cfg.users);
  for (int& c : cache) c = static_cast<int>(rng.uniform_index(cfg.contents));
  return cache;
}

/// Request popularity weights (content 0 is the most popular under zipf).
inline std::vector<double> popularity_weights(const CacheConfig& cfg) {
  std::vector<double> w(cfg.contents);
  for (int c = 0; c < cfg.contents; ++c)
    w[c] = cfg.popularity == Popularity::uniform
               ? 1.0
               : std::pow(static_cast<double>(c + 1), -cfg.zipf_s);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

/// Centroid pursuit: the waypoint the tracking UAV steers toward.
inline Point3 uav_tracking_policy(const CacheConfig& cfg,
                                  std::span<const Point3> user_positions) {
  if (user_positions.empty())
    throw invalid_parameter("uav_tracking_policy: need at least one user");
  double sx = 0.0, sy = 0.0;
  for (const Point3& p : user_positions) {
    sx += p.x;
    sy += p.y;
  }
  const auto n = static_cast<double>(user_positions.size());
  return {sx / n, sy / n, cfg.uav_altitude_m};
}

struct RequestRecord {
  double time_s = 0.0;
  int user = 0;
  int content = 0;
  Tier tier = Tier::bs;
  double delay_s = 0.0;
};

struct CacheRun {
  std::vector<int> placement;
  std::vector<RequestRecord> log;
  double self_frac = 0.0, d2d_frac = 0.0, uav_frac = 0.0, bs_frac = 0.0;
  double mean_delay_s = 0.0;
  double mean_uav_user_distance_m = 0.0;
};

namespace cache_detail {

// Random-waypoint walker; in cluster mode waypoints are drawn around a
// shared drifting blob center so users stay bunched.
struct Walker {
  Point3 pos;
  Point3 goal;
  double speed = 1.0;
  double pause_left = 0.0;
};

inline Point3 clamp_to(const AreaSpec& area, double x, double y) {
  return {std::clamp(x, 0.0, area.width), std::clamp(y, 0.0, area.height), 0.0};
}

inline void step_walker(Walker& w, double tick, const AreaSpec& area,
                        const CacheConfig& cfg, Rng& rng, const Point3* blob) {
  if (w.pause_left > 0.0) {
    w.pause_left = std::max(0.0, w.pause_left - tick);
    return;
  }
  const double d = horizontal_distance(w.pos, w.goal);
  const double step = w.speed * tick;
  if (d <= step) {
    w.pos = w.goal;
    w.pause_left = cfg.pause_s;
    if (blob) {
      w.goal = clamp_to(area, blob->x + cfg.cluster_sigma_m * rng.normal(),
                        blob->y + cfg.cluster_sigma_m * rng.normal());
    } else {
      w.goal = {rng.uniform(0.0, area.width), rng.uniform(0.0, area.height), 0.0};
    }
    w.speed = rng.uniform(cfg.user_speed_min_mps, cfg.user_speed_max_mps);
    return;
  }
  w.pos.x += (w.goal.x - w.pos.x) / d * step;
  w.pos.y += (w.goal.y - w.pos.y) / d * step;
}

inline double link_delay(double base_s, double power_w, double gain,
                         const CacheConfig& cfg) {
  const double snr = power_w * gain / cfg.channel.noise_power_w;
  const double se = std::log1p(snr) / M_LN2;
  if (se <= 0.0) return std::numeric_limits<double>::infinity();
  return base_s + cfg.payload_bits / (cfg.channel.bandwidth_hz * se);
}

}  // namespace cache_detail

/// Delivery phase: time-stepped mobility plus request resolution in the
/// strict tier order self -> D2D -> UAV -> BS. The mobility, request, and
/// fade streams are independent, so runs with different UAV policies stay
/// pairwise comparable under one seed.
inline CacheRun delivery_phase(const CacheConfig& cfg, CachePolicy policy,
                               std::vector<int> placement, std::uint64_t seed) {
  validate(cfg);
  if (placement.size() != static_cast<std::size_t>(cfg.users))
    throw invalid_parameter("delivery_phase: placement size != users");
  for (int c : placement)
    if (c < 0 || c >= cfg.contents)
      throw invalid_parameter("delivery_phase: cached content id out of range");

  Rng mobility_rng(derive_seed(seed, 1));
  Rng request_rng(derive_seed(seed, 2));
  Rng fade_rng(derive_seed(seed, 3));

  // UAV caches the most popular contents
  const std::vector<double> weights = popularity_weights(cfg);
  std::vector<int> by_popularity(cfg.contents);
  std::iota(by_popularity.begin(), by_popularity.end(), 0);
  std::stable_sort(by_popularity.begin(), by_popularity.end(),
                   [&](int a, int b) { return weights[a] > weights[b]; });
  std::vector<bool> on_uav(cfg.contents, false);
  for (int r = 0; r < std::min(cfg.uav_top_k, cfg.contents); ++r)
    on_uav[by_popularity[r]] = true;

  // mobility state
  Point3 blob{mobility_rng.uniform(0.0, cfg.area.width),
              mobility_rng.uniform(0.0, cfg.area.height), 0.0};
  Point3 blob_goal{mobility_rng.uniform(0.0, cfg.area.width),
                   mobility_rng.uniform(0.0, cfg.area.height), 0.0};
  const bool clustered = cfg.mobility == MobilityKind::cluster;
  std::vector<cache_detail::Walker> walkers(cfg.users);
  for (auto& w : walkers) {
    if (clustered) {
      w.pos = cache_detail::clamp_to(cfg.area,
                                     blob.x + cfg.cluster_sigma_m * mobility_rng.normal(),
                                     blob.y + cfg.cluster_sigma_m * mobility_rng.normal());
      w.goal = w.pos;
    } else {
      w.pos = {mobility_rng.uniform(0.0, cfg.area.width),
               mobility_rng.uniform(0.0, cfg.area.height), 0.0};
      w.goal = w.pos;
    }
    w.speed = mobility_rng.uniform(cfg.user_speed_min_mps, cfg.user_speed_max_mps);
  }

  Point3 uav = cfg.area.center(cfg.uav_altitude_m);
  const std::vector<double> cum = [&] {
    std::vector<double> c(weights.size());
    std::partial_sum(weights.begin(), weights.end(), c.begin());
    return c;
  }();

  CacheRun run;
  run.placement = std::move(placement);
  double distance_sum = 0.0;
  std::size_t distance_samples = 0;
  const auto ticks = static_cast<std::size_t>(std::llround(cfg.duration_s / cfg.tick_s));

  for (std::size_t tick = 0; tick < ticks; ++tick) {
    const double now = tick * cfg.tick_s;

    // blob drift
    if (clustered) {
      const double d = horizontal_distance(blob, blob_goal);
      const double step = cfg.cluster_speed_mps * cfg.tick_s;
      if (d <= step) {
        blob = blob_goal;
        blob_goal = {mobility_rng.uniform(0.0, cfg.area.width),
                     mobility_rng.uniform(0.0, cfg.area.height), 0.0};
      } else {
        blob.x += (blob_goal.x - blob.x) / d * step;
        blob.y += (blob_goal.y - blob.y) / d * step;
      }
    }
    for (auto& w : walkers)
      cache_detail::step_walker(w, cfg.tick_s, cfg.area, cfg, mobility_rng,
                                clustered ? &blob : nullptr);

    // UAV motion
    if (policy == CachePolicy::tracking) {
      std::vector<Point3> positions(walkers.size());
      for (std::size_t u = 0; u < walkers.size(); ++u) positions[u] = walkers[u].pos;
      const Point3 goal = uav_tracking_policy(cfg, positions);
      const double d = horizontal_distance(uav, goal);
      const double step = cfg.uav_speed_mps * cfg.tick_s;
      if (d <= step) {
        uav.x = goal.x;
        uav.y = goal.y;
      } else if (d > 0.0) {
        uav.x += (goal.x - uav.x) / d * step;
        uav.y += (goal.y - uav.y) / d * step;
      }
    }

    for (const auto& w : walkers)
      distance_sum += horizontal_distance(uav, w.pos);
    distance_samples += walkers.size();

    // requests this tick
    const auto requests = request_rng.poisson(cfg.users * cfg.request_rate_hz * cfg.tick_s);
    for (std::uint64_t r = 0; r < requests; ++r) {
      const int user = static_cast<int>(request_rng.uniform_index(cfg.users));
      const double u = request_rng.uniform();
      const int content = static_cast<int>(
          std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());

      RequestRecord rec;
      rec.time_s = now;
      rec.user = user;
      rec.content = content;

      if (run.placement[user] == content) {
        rec.tier = Tier::self_hit;
        rec.delay_s = 0.0;
      } else {
        // nearest holder within the D2D radius (ties to the lowest index)
        int holder = -1;
        double holder_d = std::numeric_limits<double>::infinity();
        for (int v = 0; v < cfg.users; ++v) {
          if (v == user || run.placement[v] != content) continue;
          const double d = horizontal_distance(walkers[user].pos, walkers[v].pos);
          if (d <= cfg.d2d_radius_m && d < holder_d) {
            holder = v;
            holder_d = d;
          }
        }
        if (holder >= 0) {
          const double fade = std::max(fade_rng.exponential(), cfg.fade_floor);
          const double d = std::max(holder_d, 1.0);  // near-field guard
          const double gain =
              cfg.channel.beta0 * std::pow(d, -cfg.channel.alpha_d2d) * fade;
          rec.tier = Tier::d2d;
          rec.delay_s = cache_detail::link_delay(cfg.delay_d2d_base_s,
                                                 cfg.d2d_power_w, gain, cfg);
        } else if (on_uav[content]) {
          const double gain = cfg.channel.beta0 /
                              squared_distance(uav, walkers[user].pos);
          rec.tier = Tier::uav;
          rec.delay_s = cache_detail::link_delay(cfg.delay_uav_base_s,
                                                 cfg.uav_power_w, gain, cfg);
        } else {
          rec.tier = Tier::bs;
          rec.delay_s = cfg.delay_bs_s;
        }
      }
      run.log.push_back(rec);
    }
  }

  double delay_sum = 0.0;
  for (const auto& rec : run.log) {
    delay_sum += rec.delay_s;
    switch (rec.tier) {
      case Tier::self_hit: run.self_frac += 1.0; break;
      case Tier::d2d: run.d2d_frac += 1.0; break;
      case Tier::uav: run.uav_frac += 1.0; break;
      case Tier::bs: run.bs_frac += 1.0; break;
    }
  }
  if (!run.log.empty()) {
    const auto n = static_cast<double>(run.log.size());
    run.self_frac /= n;
    run.d2d_frac /= n;
    run.uav_frac /= n;
    run.bs_frac /= n;
    run.mean_delay_s = delay_sum / n;
  }
  if (distance_samples > 0)
    run.mean_uav_user_distance_m = distance_sum / static_cast<double>(distance_samples);
  return run;
}

/// Placement followed by delivery under one seed.
inline CacheRun run_cache(const CacheConfig& cfg, CachePolicy policy,
                          std::uint64_t seed) {
  return delivery_phase(cfg, policy, placement_phase(cfg, seed), seed);
}

/// Delay-tolerant surveillance: sweep the sensor field, then deliver the
/// accumulated payload to the ground center.
struct SurveillanceConfig {
  AreaSpec area{1000.0, 1000.0};
  double altitude_m = 100.0;
  double speed_mps = 10.0;
  double d2d_radius_m = 100.0;
  double payload_bits_per_sensor = 1e7;
  double uav_power_w = 5.0;
  ChannelParams channel{1e-6, 3.0, 1e-14, 2e7};
};

struct SurveillanceResult {
  double collection_s = 0.0;    // flight through the sensor sweep
  double flight_s = 0.0;        // final leg to the ground center
  double transmission_s = 0.0;  // payload delivery at the center
  double total_delay_s = 0.0;
  double bits_delivered = 0.0;
};

/// Visits every sensor overhead in a fixed boustrophedon order (sweep bands
/// of two D2D radii, alternating direction), then flies to the center and
/// transmits at the LOS link rate from directly above it.
inline SurveillanceResult surveillance_run(const SurveillanceConfig& cfg,
                                           const NodeSet& sensors) {
  validate(cfg.area);
  validate(cfg.channel);
  if (!(cfg.speed_mps > 0.0))
    throw invalid_parameter("surveillance_run: speed must be positive");
  for (const Point3& s : sensors.positions)
    if (!cfg.area.contains(s))
      throw invalid_parameter("surveillance_run: sensor outside the area");

  std::vector<std::size_t> order(sensors.size());
  std::iota(order.begin(), order.end(), 0);
  const double band_h = std::max(2.0 * cfg.d2d_radius_m, 1e-6);
  auto band_of = [&](const Point3& p) { return static_cast<long>(p.y / band_h); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Point3& pa = sensors.positions[a];
    const Point3& pb = sensors.positions[b];
    const long ba = band_of(pa), bb = band_of(pb);
    if (ba != bb) return ba < bb;
    return (ba % 2 == 0) ? pa.x < pb.x : pa.x > pb.x;
  });

  Point3 pos{0.0, 0.0, cfg.altitude_m};
  double sweep_m = 0.0;
  for (std::size_t idx : order) {
    const Point3 over{sensors.positions[idx].x, sensors.positions[idx].y,
                      cfg.altitude_m};
    sweep_m += horizontal_distance(pos, over);
    pos = over;
  }
  const Point3 center_over = cfg.area.center(cfg.altitude_m);
  const double leg_m = horizontal_distance(pos, center_over);

  SurveillanceResult out;
  out.collection_s = sweep_m / cfg.speed_mps;
  out.flight_s = leg_m / cfg.speed_mps;
  out.bits_delivered = cfg.payload_bits_per_sensor * static_cast<double>(sensors.size());
  const double gain = cfg.channel.beta0 / (cfg.altitude_m * cfg.altitude_m);
  const double se = spectral_efficiency(gain * cfg.uav_power_w /
                                        cfg.channel.noise_power_w);
  out.transmission_s =
      out.bits_delivered > 0.0
          ? out.bits_delivered / (cfg.channel.bandwidth_hz * se)
          : 0.0;
  out.total_delay_s = out.collection_s + out.flight_s + out.transmission_s;
  return out;
}

}  // namespace udn
