#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "udn/channel.hpp"
#include "udn/scenario_bs.hpp"
#include "udn/scenario_cache.hpp"
#include "udn/scenario_relay.hpp"
#include "udn/scenario_wet.hpp"

namespace udn {

/// Which request-serving policies a cache run reports.
enum class CachePolicyChoice { tracking, static_center, both };
enum class CacheMode { users, surveillance };

/// A fully parsed experiment: one scenario, its configuration, optional
/// sweep axes, and the Monte Carlo settings.
struct ExperimentSpec {
  std::string scenario;  // bs | relay | wet | cache
  int trials = 1;
  std::uint64_t seed = 1;
  std::string out;  // optional output path; the CLI may override

  BsConfig bs;
  RelayConfig relay;
  WetConfig wet;
  CacheConfig cache;
  CachePolicyChoice cache_policy = CachePolicyChoice::both;
  CacheMode cache_mode = CacheMode::users;
  int cache_sensor_rows = 4;
  int cache_sensor_cols = 4;
  double cache_payload_bits_per_sensor = 1e7;

  struct SweepAxis {
    std::string key;
    std::vector<std::string> values;  // raw tokens, validated against the key
  };
  std::vector<SweepAxis> sweeps;
};

struct SpecError {
  int line = 0;  // 0: file-level problem
  std::string key;
  std::string message;
};

struct ParseOutcome {
  std::optional<ExperimentSpec> spec;
  std::vector<SpecError> errors;
  bool ok() const { return spec.has_value() && errors.empty(); }
};

namespace spec_detail {

using ApplyFn =
    std::function<std::optional<std::string>(ExperimentSpec&, const std::string&)>;

inline std::optional<double> parse_number(const std::string& raw) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_integer(const std::string& raw) {
  if (raw.empty()) return std::nullopt;
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> parse_unsigned(const std::string& raw) {
  if (raw.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) return std::nullopt;
  return v;
}

// numeric key with a range predicate
inline ApplyFn number(std::function<void(ExperimentSpec&, double)> set,
                      std::function<bool(double)> valid, std::string range_text) {
  return [=](ExperimentSpec& spec, const std::string& raw) -> std::optional<std::string> {
    const auto v = parse_number(raw);
    if (!v) return "expected a number, got '" + raw + "'";
    if (!valid(*v)) return "value " + raw + " out of range (" + range_text + ")";
    set(spec, *v);
    return std::nullopt;
  };
}

inline ApplyFn integer(std::function<void(ExperimentSpec&, std::int64_t)> set,
                       std::function<bool(std::int64_t)> valid,
                       std::string range_text) {
  return [=](ExperimentSpec& spec, const std::string& raw) -> std::optional<std::string> {
    const auto v = parse_integer(raw);
    if (!v) return "expected an integer, got '" + raw + "'";
    if (!valid(*v)) return "value " + raw + " out of range (" + range_text + ")";
    set(spec, *v);
    return std::nullopt;
  };
}

inline ApplyFn keyword(std::function<std::optional<std::string>(ExperimentSpec&,
                                                                const std::string&)> set) {
  return set;
}

inline const std::map<std::string, ApplyFn>& registry() {
  static const std::map<std::string, ApplyFn> table = [] {
    std::map<std::string, ApplyFn> reg;
    auto positive = [](double v) { return v > 0.0; };
    auto nonneg = [](double v) { return v >= 0.0; };

    reg["scenario"] = keyword([](ExperimentSpec& s, const std::string& raw)
                                  -> std::optional<std::string> {
      if (raw != "bs" && raw != "relay" && raw != "wet" && raw != "cache")
        return "unknown scenario '" + raw + "' (bs, relay, wet, cache)";
      s.scenario = raw;
      return std::nullopt;
    });
    reg["trials"] = integer([](ExperimentSpec& s, std::int64_t v) { s.trials = static_cast<int>(v); },
                            [](std::int64_t v) { return v >= 1 && v <= 1000000; },
                            ">= 1");
    reg["seed"] = keyword([](ExperimentSpec& s, const std::string& raw)
                              -> std::optional<std::string> {
      const auto v = parse_unsigned(raw);
      if (!v) return "expected an unsigned integer seed, got '" + raw + "'";
      s.seed = *v;
      return std::nullopt;
    });
    reg["out"] = keyword([](ExperimentSpec& s, const std::string& raw)
                             -> std::optional<std::string> {
      if (raw.empty()) return "expected a path";
      s.out = raw;
      return std::nullopt;
    });

    auto channel_keys = [&](const std::string& prefix,
                            std::function<ChannelParams&(ExperimentSpec&)> get) {
      reg[prefix + ".channel.beta0"] =
          number([get](ExperimentSpec& s, double v) { get(s).beta0 = v; }, positive, "> 0");
      reg[prefix + ".channel.alpha_d2d"] =
          number([get](ExperimentSpec& s, double v) { get(s).alpha_d2d = v; },
                 [](double v) { return v >= 2.0; }, ">= 2");
      reg[prefix + ".channel.noise_power_w"] =
          number([get](ExperimentSpec& s, double v) { get(s).noise_power_w = v; },
                 positive, "> 0");
      reg[prefix + ".channel.bandwidth_hz"] =
          number([get](ExperimentSpec& s, double v) { get(s).bandwidth_hz = v; },
                 positive, "> 0");
    };

    // --- bs ---
    reg["bs.area_width_m"] = number([](ExperimentSpec& s, double v) { s.bs.area.width = v; },
                                    positive, "> 0");
    reg["bs.area_height_m"] = number([](ExperimentSpec& s, double v) { s.bs.area.height = v; },
                                     positive, "> 0");
    reg["bs.d2d_density_per_m2"] =
        number([](ExperimentSpec& s, double v) { s.bs.d2d_density_per_m2 = v; }, nonneg,
               ">= 0");
    reg["bs.d2d_max_distance_m"] =
        number([](ExperimentSpec& s, double v) { s.bs.d2d_max_distance_m = v; }, positive,
               "> 0");
    reg["bs.sinr_threshold_db"] = number(
        [](ExperimentSpec& s, double v) { s.bs.sinr_threshold = db_to_linear(v); },
        [](double) { return true; }, "any dB value");
    reg["bs.uav_power_max_w"] =
        number([](ExperimentSpec& s, double v) { s.bs.uav_power_max_w = v; }, positive, "> 0");
    reg["bs.d2d_power_max_w"] =
        number([](ExperimentSpec& s, double v) { s.bs.d2d_power_max_w = v; }, positive, "> 0");
    reg["bs.height_min_m"] =
        number([](ExperimentSpec& s, double v) { s.bs.height_min_m = v; }, positive, "> 0");
    reg["bs.height_max_m"] =
        number([](ExperimentSpec& s, double v) { s.bs.height_max_m = v; }, positive, "> 0");
    reg["bs.height_points"] =
        integer([](ExperimentSpec& s, std::int64_t v) { s.bs.height_points = static_cast<int>(v); },
                [](std::int64_t v) { return v >= 1 && v <= 4096; }, "1..4096");
    channel_keys("bs", [](ExperimentSpec& s) -> ChannelParams& { return s.bs.channel; });

    // --- relay ---
    reg["relay.separation_m"] =
        number([](ExperimentSpec& s, double v) { s.relay.separation_m = v; }, positive, "> 0");
    reg["relay.altitude_m"] =
        number([](ExperimentSpec& s, double v) { s.relay.altitude_m = v; }, positive, "> 0");
    reg["relay.horizon_s"] =
        number([](ExperimentSpec& s, double v) { s.relay.horizon_s = v; }, positive, "> 0");
    reg["relay.speed_max_mps"] =
        number([](ExperimentSpec& s, double v) { s.relay.speed_max_mps = v; }, nonneg, ">= 0");
    reg["relay.slots"] =
        integer([](ExperimentSpec& s, std::int64_t v) { s.relay.slots = static_cast<int>(v); },
                [](std::int64_t v) { return v >= 2 && v <= 100000; }, "2..100000");
    reg["relay.lattice_points"] = integer(
        [](ExperimentSpec& s, std::int64_t v) { s.relay.lattice_points = static_cast<int>(v); },
        [](std::int64_t v) { return v >= 2 && v <= 10000; }, "2..10000");
    reg["relay.source_power_max_w"] =
        number([](ExperimentSpec& s, double v) { s.relay.source_power_max_w = v; }, positive,
               "> 0");
    reg["relay.relay_power_max_w"] =
        number([](ExperimentSpec& s, double v) { s.relay.relay_power_max_w = v; }, positive,
               "> 0");
    reg["relay.propulsion.c1"] =
        number([](ExperimentSpec& s, double v) { s.relay.propulsion.c1 = v; }, positive, "> 0");
    reg["relay.propulsion.c2"] =
        number([](ExperimentSpec& s, double v) { s.relay.propulsion.c2 = v; }, positive, "> 0");
    channel_keys("relay", [](ExperimentSpec& s) -> ChannelParams& { return s.relay.channel; });

    // --- wet ---
    reg["wet.grid_rows"] =
        integer([](ExperimentSpec& s, std::int64_t v) { s.wet.grid_rows = static_cast<int>(v); },
                [](std::int64_t v) { return v >= 1 && v <= 1000; }, "1..1000");
    reg["wet.grid_cols"] =
        integer([](ExperimentSpec& s, std::int64_t v) { s.wet.grid_cols = static_cast<int>(v); },
                [](std::int64_t v) { return v >= 1 && v <= 1000; }, "1..1000");
    reg["wet.area_width_m"] =
        number([](ExperimentSpec& s, double v) { s.wet.area.width = v; }, positive, "> 0");
    reg["wet.area_height_m"] =
        number([](ExperimentSpec& s, double v) { s.wet.area.height = v; }, positive, "> 0");
    reg["wet.altitude_m"] =
        number([](ExperimentSpec& s, double v) { s.wet.altitude_m = v; }, positive, "> 0");
    reg["wet.trajectory"] = keyword([](ExperimentSpec& s, const std::string& raw)
                                        -> std::optional<std::string> {
      if (raw == "straight") s.wet.trajectory = PathKind::straight;
      else if (raw == "sigmoid") s.wet.trajectory = PathKind::sigmoid;
      else if (raw == "spiral") s.wet.trajectory = PathKind::spiral;
      else if (raw == "hover") s.wet.trajectory = PathKind::hover;
      else return "unknown trajectory '" + raw + "' (straight, sigmoid, spiral, hover)";
      return std::nullopt;
    });
    reg["wet.schedule"] = keyword([](ExperimentSpec& s, const std::string& raw)
                                      -> std::optional<std::string> {
      if (raw == "fixed") s.wet.schedule = ScheduleKind::fixed;
      else if (raw == "valley") s.wet.schedule = ScheduleKind::valley;
      else if (raw == "ramp") s.wet.schedule = ScheduleKind::ramp;
      else return "unknown schedule '" + raw + "' (fixed, valley, ramp)";
      return std::nullopt;
    });
    reg["wet.speed_mps"] =
        number([](ExperimentSpec& s, double v) { s.wet.speed_mps = v; }, positive, "> 0");
    reg["wet.slot_s"] =
        number([](ExperimentSpec& s, double v) { s.wet.slot_s = v; }, positive, "> 0");
    reg["wet.duration_s"] =
        number([](ExperimentSpec& s, double v) { s.wet.duration_s = v; }, nonneg,
               ">= 0 (0 = one full pass)");
    reg["wet.power_cap_w"] =
        number([](ExperimentSpec& s, double v) { s.wet.power_cap_w = v; }, nonneg, ">= 0");
    reg["wet.harvest.eta"] =
        number([](ExperimentSpec& s, double v) { s.wet.harvest.eta = v; },
               [](double v) { return v >= 0.0 && v <= 1.0; }, "0..1");
    channel_keys("wet", [](ExperimentSpec& s) -> ChannelParams& { return s.wet.channel; });

    // --- cache ---
    reg["cache.users"] =
        integer([](ExperimentSpec& s, std::int64_t v) { s.cache.users = static_cast<int>(v); },
                [](std::int64_t v) { return v >= 1 && v <= 1000000; }, ">= 1");
    reg["cache.contents"] =
        integer([](ExperimentSpec& s, std::int64_t v) { s.cache.contents = static_cast<int>(v); },
                [](std::int64_t v) { return v >= 1 && v <= 1000000; }, ">= 1");
    reg["cache.popularity"] = keyword([](ExperimentSpec& s, const std::string& raw)
                                          -> std::optional<std::string> {
      if (raw == "uniform") s.cache.popularity = Popularity::uniform;
      else if (raw == "zipf") s.cache.popularity = Popularity::zipf;
      else return "unknown popularity '" + raw + "' (uniform, zipf)";
      return std::nullopt;
    });
    reg["cache.zipf_s"] =
        number([](ExperimentSpec& s, double v) { s.cache.zipf_s = v; }, nonneg, ">= 0");
    reg["cache.d2d_radius_m"] =
        number([](ExperimentSpec& s, double v) { s.cache.d2d_radius_m = v; }, nonneg, ">= 0");
    reg["cache.area_width_m"] =
        number([](ExperimentSpec& s, double v) { s.cache.area.width = v; }, positive, "> 0");
    reg["cache.area_height_m"] =
        number([](ExperimentSpec& s, double v) { s.cache.area.height = v; }, positive, "> 0");
    reg["cache.uav_altitude_m"] =
        number([](ExperimentSpec& s, double v) { s.cache.uav_altitude_m = v; }, positive, "> 0");
    reg["cache.uav_speed_mps"] =
        number([](ExperimentSpec& s, double v) { s.cache.uav_speed_mps = v; }, nonneg, ">= 0");
    reg["cache.mobility"] = keyword([](ExperimentSpec& s, const std::string& raw)
                                        -> std::optional<std::string> {
      if (raw == "waypoint") s.cache.mobility = MobilityKind::waypoint;
      else if (raw == "cluster") s.cache.mobility = MobilityKind::cluster;
      else return "unknown mobility '" + raw + "' (waypoint, cluster)";
      return std::nullopt;
    });
    reg["cache.policy"] = keyword([](ExperimentSpec& s, const std::string& raw)
                                      -> std::optional<std::string> {
      if (raw == "tracking") s.cache_policy = CachePolicyChoice::tracking;
      else if (raw == "static") s.cache_policy = CachePolicyChoice::static_center;
      else if (raw == "both") s.cache_policy = CachePolicyChoice::both;
      else return "unknown policy '" + raw + "' (tracking, static, both)";
      return std::nullopt;
    });
    reg["cache.mode"] = keyword([](ExperimentSpec& s, const std::string& raw)
                                    -> std::optional<std::string> {
      if (raw == "users") s.cache_mode = CacheMode::users;
      else if (raw == "surveillance") s.cache_mode = CacheMode::surveillance;
      else return "unknown mode '" + raw + "' (users, surveillance)";
      return std::nullopt;
    });
    reg["cache.user_speed_min_mps"] =
        number([](ExperimentSpec& s, double v) { s.cache.user_speed_min_mps = v; }, positive,
               "> 0");
    reg["cache.user_speed_max_mps"] =
        number([](ExperimentSpec& s, double v) { s.cache.user_speed_max_mps = v; }, positive,
               "> 0");
    reg["cache.pause_s"] =
        number([](ExperimentSpec& s, double v) { s.cache.pause_s = v; }, nonneg, ">= 0");
    reg["cache.cluster_sigma_m"] =
        number([](ExperimentSpec& s, double v) { s.cache.cluster_sigma_m = v; }, nonneg, ">= 0");
    reg["cache.cluster_speed_mps"] =
        number([](ExperimentSpec& s, double v) { s.cache.cluster_speed_mps = v; }, nonneg,
               ">= 0");
    reg["cache.duration_s"] =
        number([](ExperimentSpec& s, double v) { s.cache.duration_s = v; }, positive, "> 0");
    reg["cache.tick_s"] =
        number([](ExperimentSpec& s, double v) { s.cache.tick_s = v; }, positive, "> 0");
    reg["cache.request_rate_hz"] =
        number([](ExperimentSpec& s, double v) { s.cache.request_rate_hz = v; }, nonneg, ">= 0");
    reg["cache.d2d_power_w"] =
        number([](ExperimentSpec& s, double v) { s.cache.d2d_power_w = v; }, positive, "> 0");
    reg["cache.uav_power_w"] =
        number([](ExperimentSpec& s, double v) { s.cache.uav_power_w = v; }, positive, "> 0");
    reg["cache.delay_d2d_base_s"] =
        number([](ExperimentSpec& s, double v) { s.cache.delay_d2d_base_s = v; }, nonneg, ">= 0");
    reg["cache.delay_uav_base_s"] =
        number([](ExperimentSpec& s, double v) { s.cache.delay_uav_base_s = v; }, nonneg, ">= 0");
    reg["cache.delay_bs_s"] =
        number([](ExperimentSpec& s, double v) { s.cache.delay_bs_s = v; }, nonneg, ">= 0");
    reg["cache.payload_bits"] =
        number([](ExperimentSpec& s, double v) { s.cache.payload_bits = v; }, nonneg, ">= 0");
    reg["cache.fade_floor"] =
        number([](ExperimentSpec& s, double v) { s.cache.fade_floor = v; }, nonneg, ">= 0");
    reg["cache.uav_top_k"] =
        integer([](ExperimentSpec& s, std::int64_t v) { s.cache.uav_top_k = static_cast<int>(v); },
                [](std::int64_t v) { return v >= 0 && v <= 1000000; }, ">= 0");
    reg["cache.sensor_rows"] = integer(
        [](ExperimentSpec& s, std::int64_t v) { s.cache_sensor_rows = static_cast<int>(v); },
        [](std::int64_t v) { return v >= 0 && v <= 1000; }, "0..1000");
    reg["cache.sensor_cols"] = integer(
        [](ExperimentSpec& s, std::int64_t v) { s.cache_sensor_cols = static_cast<int>(v); },
        [](std::int64_t v) { return v >= 0 && v <= 1000; }, "0..1000");
    reg["cache.payload_bits_per_sensor"] = number(
        [](ExperimentSpec& s, double v) { s.cache_payload_bits_per_sensor = v; }, nonneg,
        ">= 0");
    channel_keys("cache", [](ExperimentSpec& s) -> ChannelParams& { return s.cache.channel; });

    return reg;
  }();
  return table;
}

inline std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  return text;
}

inline std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace spec_detail

/// List of keys the parser accepts (for docs and the CLI).
inline std::vector<std::string> known_spec_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, fn] : spec_detail::registry()) keys.push_back(key);
  return keys;
}

/// Parses and validates an experiment spec. All problems are reported, each
/// with its line number and key path; a spec is returned only when every
/// line parsed cleanly.
inline ParseOutcome parse_spec(std::string_view text) {
  using namespace spec_detail;
  ParseOutcome outcome;
  ExperimentSpec spec;
  std::vector<SpecError>& errors = outcome.errors;

  std::map<std::string, int> seen_keys;   // key -> first line
  std::map<std::string, int> seen_sweeps;

  int line_no = 0;
  std::size_t pos = 0;
  bool scenario_seen = false;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const bool is_sweep = line.starts_with("sweep ") || line.starts_with("sweep\t");
    if (is_sweep) line = trim(line.substr(6));

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back({line_no, std::string(line), "expected 'key = value'"});
      continue;
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (key.empty()) {
      errors.push_back({line_no, "", "missing key before '='"});
      continue;
    }

    const auto& reg = registry();
    const auto handler = reg.find(key);
    if (handler == reg.end()) {
      errors.push_back({line_no, key, "unknown key"});
      continue;
    }

    if (is_sweep) {
      if (const auto [it, inserted] = seen_sweeps.emplace(key, line_no); !inserted) {
        errors.push_back({line_no, key,
                          "duplicate sweep (first on line " +
                              std::to_string(it->second) + ")"});
        continue;
      }
      if (key == "scenario" || key == "trials" || key == "seed" || key == "out") {
        errors.push_back({line_no, key, "key cannot be swept"});
        continue;
      }
      const std::vector<std::string> values = split_tokens(value);
      if (values.empty()) {
        errors.push_back({line_no, key, "sweep needs at least one value"});
        continue;
      }
      bool all_ok = true;
      for (const auto& v : values) {
        ExperimentSpec scratch = spec;
        if (const auto err = handler->second(scratch, v)) {
          errors.push_back({line_no, key, *err});
          all_ok = false;
        }
      }
      if (all_ok) spec.sweeps.push_back({key, values});
    } else {
      if (const auto [it, inserted] = seen_keys.emplace(key, line_no); !inserted) {
        errors.push_back({line_no, key,
                          "duplicate key (first on line " +
                              std::to_string(it->second) + ")"});
        continue;
      }
      if (const auto err = handler->second(spec, value)) {
        errors.push_back({line_no, key, *err});
      } else if (key == "scenario") {
        scenario_seen = true;
      }
    }
  }

  if (!scenario_seen) {
    errors.push_back({0, "scenario", "required key missing (bs, relay, wet, cache)"});
  } else {
    for (const auto& axis : spec.sweeps) {
      if (!axis.key.starts_with(spec.scenario + "."))
        errors.push_back({0, axis.key,
                          "sweep key does not belong to scenario '" + spec.scenario + "'"});
    }
    // deterministic scenarios take exactly one trial
    if ((spec.scenario == "relay" || spec.scenario == "wet" ||
         (spec.scenario == "cache" && spec.cache_mode == CacheMode::surveillance)) &&
        spec.trials != 1)
      errors.push_back({0, "trials",
                        "scenario '" + spec.scenario +
                            "' is deterministic; trials must be 1"});
    // cross-field checks via the module validators
    try {
      if (spec.scenario == "bs") validate(spec.bs);
      if (spec.scenario == "relay") validate(spec.relay);
      if (spec.scenario == "wet") validate(spec.wet);
      if (spec.scenario == "cache") validate(spec.cache);
    } catch (const std::exception& e) {
      errors.push_back({0, spec.scenario, e.what()});
    }
  }

  if (errors.empty()) outcome.spec = std::move(spec);
  return outcome;
}

/// Applies one swept key's value; the key is known-valid after parse_spec.
inline void apply_spec_value(ExperimentSpec& spec, const std::string& key,
                             const std::string& value) {
  const auto& reg = spec_detail::registry();
  const auto it = reg.find(key);
  if (it == reg.end()) throw invalid_parameter("apply_spec_value: unknown key " + key);
  if (const auto err = it->second(spec, value))
    throw invalid_parameter("apply_spec_value: " + key + ": " + *err);
}

}  // namespace udn
