#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "udn/scenario_cache.hpp"

using namespace udn;

namespace {

CacheConfig small_config() {
  CacheConfig cfg;
  cfg.users = 200;
  cfg.contents = 10;
  cfg.duration_s = 300.0;
  cfg.request_rate_hz = 1.0 / 30.0;
  return cfg;
}

}  // namespace

TEST_CASE("placement is uniform, deterministic, and trivial for one content",
          "[cache]") {
  CacheConfig cfg;
  cfg.contents = 1;
  for (int c : placement_phase(cfg, 5)) REQUIRE(c == 0);

  cfg.contents = 10;
  cfg.users = 10000;
  const std::vector<int> cache = placement_phase(cfg, 7);
  REQUIRE(cache == placement_phase(cfg, 7));
  std::vector<int> counts(10, 0);
  for (int c : cache) {
    REQUIRE(c >= 0);
    REQUIRE(c < 10);
    ++counts[c];
  }
  // binomial 3-sigma bound on each content's share
  const double sigma = std::sqrt(0.1 * 0.9 / 10000.0);
  for (int c : counts)
    REQUIRE_THAT(c / 10000.0, Catch::Matchers::WithinAbs(0.1, 3.0 * sigma));
}

TEST_CASE("a single content means every request is a self hit", "[cache]") {
  CacheConfig cfg = small_config();
  cfg.contents = 1;
  const CacheRun run = run_cache(cfg, CachePolicy::tracking, 11);
  REQUIRE(run.log.size() > 100);
  CHECK(run.self_frac == 1.0);
  CHECK(run.mean_delay_s == 0.0);
}

TEST_CASE("self-hit fraction is 1/N under both popularity models", "[cache]") {
  for (Popularity pop : {Popularity::uniform, Popularity::zipf}) {
    CacheConfig cfg;
    cfg.users = 1000;
    cfg.contents = 10;
    cfg.popularity = pop;
    cfg.duration_s = 600.0;
    cfg.request_rate_hz = 1.0 / 60.0;  // ~10^4 requests
    const CacheRun run = run_cache(cfg, CachePolicy::static_center, 13);
    const auto n = static_cast<double>(run.log.size());
    REQUIRE(n > 9000);
    const double sigma = std::sqrt(0.1 * 0.9 / n);
    REQUIRE_THAT(run.self_frac, Catch::Matchers::WithinAbs(0.1, 3.0 * sigma));
  }
}

TEST_CASE("every request resolves to exactly one tier", "[cache]") {
  const CacheConfig cfg = small_config();
  const CacheRun run = run_cache(cfg, CachePolicy::tracking, 17);
  CHECK_THAT(run.self_frac + run.d2d_frac + run.uav_frac + run.bs_frac,
             Catch::Matchers::WithinAbs(1.0, 1e-12));
  for (const auto& rec : run.log) {
    REQUIRE(rec.delay_s >= 0.0);
    REQUIRE(std::isfinite(rec.delay_s));
  }
}

TEST_CASE("a zero D2D radius disables the D2D tier", "[cache]") {
  CacheConfig cfg = small_config();
  cfg.d2d_radius_m = 0.0;
  const CacheRun run = run_cache(cfg, CachePolicy::tracking, 19);
  CHECK(run.d2d_frac == 0.0);
  CHECK(run.uav_frac + run.bs_frac > 0.0);
}

TEST_CASE("identical seeds reproduce the identical request log", "[cache]") {
  const CacheConfig cfg = small_config();
  const CacheRun a = run_cache(cfg, CachePolicy::tracking, 23);
  const CacheRun b = run_cache(cfg, CachePolicy::tracking, 23);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    REQUIRE(a.log[i].user == b.log[i].user);
    REQUIRE(a.log[i].content == b.log[i].content);
    REQUIRE(a.log[i].tier == b.log[i].tier);
    REQUIRE(a.log[i].delay_s == b.log[i].delay_s);
  }
}

TEST_CASE("the tracking waypoint is the user centroid", "[cache]") {
  CacheConfig cfg;
  const std::vector<Point3> single{{100, 200, 0}};
  const Point3 w = uav_tracking_policy(cfg, single);
  CHECK(w.x == 100.0);
  CHECK(w.y == 200.0);
  CHECK(w.z == cfg.uav_altitude_m);

  const std::vector<Point3> symmetric{{100, 100, 0}, {900, 900, 0},
                                      {100, 900, 0}, {900, 100, 0}};
  const Point3 c = uav_tracking_policy(cfg, symmetric);
  CHECK(c.x == 500.0);
  CHECK(c.y == 500.0);

  REQUIRE_THROWS_AS(uav_tracking_policy(cfg, {}), invalid_parameter);
}

TEST_CASE("tracking closes in on a stationary user", "[cache]") {
  CacheConfig cfg = small_config();
  cfg.users = 1;
  cfg.pause_s = 1e9;  // the user never leaves its spawn point
  cfg.mobility = MobilityKind::waypoint;
  cfg.request_rate_hz = 0.0;
  cfg.duration_s = 2000.0;
  const CacheRun tracking = run_cache(cfg, CachePolicy::tracking, 29);
  const CacheRun fixed = run_cache(cfg, CachePolicy::static_center, 29);
  // long-run average: the pursuer ends up far closer than the center sentry
  REQUIRE(tracking.mean_uav_user_distance_m < 0.5 * fixed.mean_uav_user_distance_m + 1.0);
}

TEST_CASE("tracking beats the static cache for clustered users", "[cache]") {
  double tracking_sum = 0.0, static_sum = 0.0;
  double tracking_dist = 0.0, static_dist = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const CacheConfig cfg = small_config();
    const CacheRun t = run_cache(cfg, CachePolicy::tracking, 100 + s);
    const CacheRun f = run_cache(cfg, CachePolicy::static_center, 100 + s);
    tracking_sum += t.mean_delay_s;
    static_sum += f.mean_delay_s;
    tracking_dist += t.mean_uav_user_distance_m;
    static_dist += f.mean_uav_user_distance_m;
  }
  REQUIRE(tracking_dist / seeds <= static_dist / seeds);
  REQUIRE(tracking_sum / seeds <= static_sum / seeds);
}

TEST_CASE("widening the D2D radius never slows delivery on average", "[cache]") {
  const std::vector<double> radii{0.0, 50.0, 100.0, 200.0};
  std::vector<double> mean_delay;
  for (double r : radii) {
    double sum = 0.0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
      CacheConfig cfg = small_config();
      cfg.d2d_radius_m = r;
      sum += run_cache(cfg, CachePolicy::tracking, 500 + s).mean_delay_s;
    }
    mean_delay.push_back(sum / seeds);
  }
  for (std::size_t i = 1; i < mean_delay.size(); ++i)
    REQUIRE(mean_delay[i] <= mean_delay[i - 1] + 1e-4);
}

TEST_CASE("surveillance timing decomposes into sweep, leg, and transmission",
          "[cache]") {
  SurveillanceConfig cfg;

  const SurveillanceResult empty = surveillance_run(cfg, {});
  CHECK(empty.bits_delivered == 0.0);
  CHECK(empty.transmission_s == 0.0);
  CHECK_THAT(empty.total_delay_s,
             Catch::Matchers::WithinRel(std::hypot(500.0, 500.0) / cfg.speed_mps, 1e-12));

  NodeSet sensors;
  sensors.positions = {{100, 100, 0}, {400, 120, 0}, {700, 500, 0}, {200, 800, 0}};
  const SurveillanceResult base = surveillance_run(cfg, sensors);
  CHECK(base.bits_delivered == 4e7);
  CHECK_THAT(base.total_delay_s,
             Catch::Matchers::WithinRel(
                 base.collection_s + base.flight_s + base.transmission_s, 1e-12));

  SurveillanceConfig heavy = cfg;
  heavy.payload_bits_per_sensor *= 2.0;
  const SurveillanceResult loaded = surveillance_run(heavy, sensors);
  CHECK(loaded.collection_s == base.collection_s);
  CHECK(loaded.flight_s == base.flight_s);
  CHECK_THAT(loaded.transmission_s,
             Catch::Matchers::WithinRel(2.0 * base.transmission_s, 1e-12));

  SurveillanceConfig fast = cfg;
  fast.speed_mps *= 2.0;
  const SurveillanceResult quick = surveillance_run(fast, sensors);
  CHECK_THAT(quick.collection_s, Catch::Matchers::WithinRel(base.collection_s / 2.0, 1e-12));
  CHECK_THAT(quick.flight_s, Catch::Matchers::WithinRel(base.flight_s / 2.0, 1e-12));
  CHECK(quick.transmission_s == base.transmission_s);
  CHECK(quick.total_delay_s < base.total_delay_s);

  NodeSet outside;
  outside.positions = {{2000, 100, 0}};
  REQUIRE_THROWS_AS(surveillance_run(cfg, outside), invalid_parameter);
}
