#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "udn/parallel.hpp"
#include "udn/report.hpp"
#include "udn/rng.hpp"
#include "udn/scenario_bs.hpp"
#include "udn/scenario_cache.hpp"
#include "udn/scenario_relay.hpp"
#include "udn/scenario_wet.hpp"
#include "udn/spec_config.hpp"

namespace udn {

struct RunOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> trials_override;
  std::optional<std::filesystem::path> map_out;  // wet only: dense map export
};

namespace harness_detail {

inline constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ull;

inline std::uint64_t fnv1a(std::string_view text, std::uint64_t h = kFnvOffset) {
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

/// One sweep-lattice point: the raw (key, value) assignments in axis order.
struct LatticePoint {
  std::vector<std::pair<std::string, std::string>> assignments;

  /// Stable identity: hash of the name-sorted assignments. Reordering sweep
  /// axes or permuting value lists therefore never changes a point's seed.
  std::uint64_t tag() const {
    auto sorted = assignments;
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = kFnvOffset;
    for (const auto& [key, value] : sorted) {
      h = fnv1a(key, h);
      h = fnv1a("=", h);
      h = fnv1a(value, h);
      h = fnv1a(";", h);
    }
    return h;
  }
};

inline std::vector<LatticePoint> expand_lattice(const ExperimentSpec& spec) {
  std::vector<LatticePoint> points{{}};
  for (const auto& axis : spec.sweeps) {
    std::vector<LatticePoint> next;
    next.reserve(points.size() * axis.values.size());
    for (const auto& base : points)
      for (const auto& value : axis.values) {
        LatticePoint p = base;
        p.assignments.emplace_back(axis.key, value);
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }
  return points;
}

inline MetricReport::Cell seed_cell(std::uint64_t seed) {
  return std::to_string(seed);  // exact decimal; uint64 exceeds int64 range
}

inline std::vector<std::string> schema_for(const ExperimentSpec& spec) {
  if (spec.scenario == "bs")
    return {"scenario", "lambda",      "height_m", "mean_tput_bpshz", "stderr",
            "outage_frac", "trials",   "seed",     "error"};
  if (spec.scenario == "relay")
    return {"scenario", "V_mps", "T_s",      "N_slots", "tput_bpshz",
            "static_tput_bpshz", "energy_J", "ee_bits_per_hz_per_J", "error"};
  if (spec.scenario == "wet")
    return {"scenario", "trajectory", "schedule", "node_i", "node_j",
            "energy_J", "energy_norm", "error"};
  if (spec.cache_mode == CacheMode::surveillance)
    return {"scenario", "sensors",        "collection_s", "flight_s",
            "transmission_s", "total_delay_s", "bits",     "error"};
  return {"scenario", "policy", "N",       "U",       "self_hit",    "d2d_hit",
          "uav_hit",  "bs_hit", "mean_delay_s", "seed", "error"};
}

inline void append_bs_rows(MetricReport& report, const ExperimentSpec& spec,
                           int trials, std::uint64_t point_seed, int jobs) {
  BsConfig cfg = spec.bs;
  cfg.trials = trials;
  cfg.seed = point_seed;
  const std::vector<double> lambdas{cfg.d2d_density_per_m2};
  for (const BsHeightRow& row : sweep_heights(cfg, lambdas, jobs))
    report.add_row({std::string("bs"), row.lambda, row.height_m, row.mean_tput,
                    row.stderr_tput, row.outage_frac,
                    static_cast<std::int64_t>(row.trials), seed_cell(row.seed),
                    std::string()});
}

inline void append_relay_rows(MetricReport& report, const ExperimentSpec& spec) {
  const RelayConfig& cfg = spec.relay;
  const RelayResult opt = optimize_relay(cfg);
  const RelayResult base = static_baseline(cfg);
  const double energy = plan_flight_energy(opt.plan, cfg);
  const double ee = energy_efficiency(opt.plan, cfg);
  report.add_row({std::string("relay"), cfg.speed_max_mps, cfg.horizon_s,
                  static_cast<std::int64_t>(cfg.slots), opt.throughput,
                  base.throughput, energy, ee, std::string()});
}

inline void append_wet_rows(MetricReport& report, const ExperimentSpec& spec,
                            const RunOptions& opt) {
  const WetConfig& cfg = spec.wet;
  const WetResult result = run_wet(cfg);
  for (int i = 0; i < cfg.grid_rows; ++i)
    for (int j = 0; j < cfg.grid_cols; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * cfg.grid_cols + j;
      report.add_row({std::string("wet"), std::string(to_string(cfg.trajectory)),
                      std::string(to_string(cfg.schedule)),
                      static_cast<std::int64_t>(i), static_cast<std::int64_t>(j),
                      result.energy_j[k], result.energy_norm[k], std::string()});
    }
  if (opt.map_out)
    write_matrix_csv(map_matrix(result, cfg.grid_rows, cfg.grid_cols), *opt.map_out);
}

inline void append_cache_rows(MetricReport& report, const ExperimentSpec& spec,
                              int trials, std::uint64_t point_seed, int jobs) {
  if (spec.cache_mode == CacheMode::surveillance) {
    SurveillanceConfig cfg;
    cfg.area = spec.cache.area;
    cfg.altitude_m = spec.cache.uav_altitude_m;
    cfg.speed_mps = std::max(spec.cache.uav_speed_mps, 1e-9);
    cfg.d2d_radius_m = spec.cache.d2d_radius_m;
    cfg.payload_bits_per_sensor = spec.cache_payload_bits_per_sensor;
    cfg.uav_power_w = spec.cache.uav_power_w;
    cfg.channel = spec.cache.channel;
    const NodeSet sensors =
        spec.cache_sensor_rows * spec.cache_sensor_cols > 0
            ? make_grid(cfg.area, spec.cache_sensor_rows, spec.cache_sensor_cols)
            : NodeSet{};
    const SurveillanceResult r = surveillance_run(cfg, sensors);
    report.add_row({std::string("cache"),
                    static_cast<std::int64_t>(sensors.size()), r.collection_s,
                    r.flight_s, r.transmission_s, r.total_delay_s,
                    r.bits_delivered, std::string()});
    return;
  }

  std::vector<CachePolicy> policies;
  if (spec.cache_policy != CachePolicyChoice::static_center)
    policies.push_back(CachePolicy::tracking);
  if (spec.cache_policy != CachePolicyChoice::tracking)
    policies.push_back(CachePolicy::static_center);

  struct TrialOut {
    std::vector<CacheRun> runs;
    std::uint64_t seed = 0;
  };
  std::vector<TrialOut> outs(trials);
  parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t t) {
    outs[t].seed = derive_seed(point_seed, t);
    for (CachePolicy policy : policies)
      outs[t].runs.push_back(run_cache(spec.cache, policy, outs[t].seed));
  });
  for (const TrialOut& out : outs)
    for (std::size_t p = 0; p < policies.size(); ++p) {
      const CacheRun& run = out.runs[p];
      report.add_row({std::string("cache"), std::string(to_string(policies[p])),
                      static_cast<std::int64_t>(spec.cache.contents),
                      static_cast<std::int64_t>(spec.cache.users), run.self_frac,
                      run.d2d_frac, run.uav_frac, run.bs_frac, run.mean_delay_s,
                      seed_cell(out.seed), std::string()});
    }
}

}  // namespace harness_detail

/// Seed of one (lattice point, trial) cell: the published mixing chain
/// mix(mix(master) ^ point_tag) then mix(. ^ trial).
inline std::uint64_t experiment_child_seed(std::uint64_t master,
                                           std::uint64_t point_tag,
                                           std::uint64_t trial) {
  return derive_seed(derive_seed(master, point_tag), trial);
}

/// Runs every lattice point of the spec and collects rows in lattice-then-
/// trial order. A failing lattice point contributes a row whose `error`
/// column carries the message; other points still run. Output is identical
/// for any worker count.
inline MetricReport run_experiment(const ExperimentSpec& spec,
                                   const RunOptions& opt = {}) {
  using namespace harness_detail;
  ExperimentSpec base = spec;
  if (opt.seed_override) base.seed = *opt.seed_override;
  if (opt.trials_override) base.trials = *opt.trials_override;

  MetricReport report;
  report.header = schema_for(base);

  for (const LatticePoint& point : expand_lattice(base)) {
    ExperimentSpec staged = base;
    std::string fail;
    try {
      for (const auto& [key, value] : point.assignments)
        apply_spec_value(staged, key, value);
      const std::uint64_t point_seed = derive_seed(base.seed, point.tag());
      if (staged.scenario == "bs") {
        validate(staged.bs);
        append_bs_rows(report, staged, base.trials, point_seed, opt.jobs);
      } else if (staged.scenario == "relay") {
        validate(staged.relay);
        append_relay_rows(report, staged);
      } else if (staged.scenario == "wet") {
        validate(staged.wet);
        append_wet_rows(report, staged, opt);
      } else if (staged.scenario == "cache") {
        validate(staged.cache);
        append_cache_rows(report, staged, base.trials, point_seed, opt.jobs);
      } else {
        fail = "unknown scenario " + staged.scenario;
      }
    } catch (const std::exception& e) {
      fail = e.what();
    }
    if (!fail.empty()) {
      std::vector<MetricReport::Cell> row(report.header.size(), std::string());
      row.front() = staged.scenario;
      row.back() = fail;
      report.add_row(std::move(row));
    }
  }
  return report;
}

}  // namespace udn
