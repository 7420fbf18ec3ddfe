#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "udn/scenario_bs.hpp"

using namespace udn;

namespace {

// Independent recomputation of the sum throughput, written directly from the
// link-budget formulas with no shared code path.
double recompute_sum_tput(const BsInstance& inst, const BsConfig& cfg, double h,
                          std::span<const double> powers, bool* feasible) {
  const double noise = cfg.channel.noise_power_w;
  const double beta0 = cfg.channel.beta0;
  const double alpha = cfg.channel.alpha_d2d;
  const std::size_t k = inst.pair_count();
  const Point3 uav{inst.uav_ground.x, inst.uav_ground.y, h};

  auto air = [&](const Point3& ground) {
    const double dx = uav.x - ground.x, dy = uav.y - ground.y;
    return beta0 / (dx * dx + dy * dy + h * h);
  };
  auto ground_gain = [&](const Point3& a, const Point3& b, double fade) {
    const double d = std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
    return beta0 * std::pow(std::max(d, 1e-6), -alpha) * fade;
  };

  double interference_user = 0.0;
  for (std::size_t j = 0; j < k; ++j)
    interference_user +=
        powers[1 + j] * ground_gain(inst.pairs[j].first, inst.user, inst.fade_user[j]);
  const double user_sinr = powers[0] * air(inst.user) / (noise + interference_user);
  if (feasible) *feasible = user_sinr >= cfg.sinr_threshold;
  double total = std::log2(1.0 + user_sinr);

  for (std::size_t i = 0; i < k; ++i) {
    double interference = powers[0] * air(inst.pairs[i].second);
    for (std::size_t j = 0; j < k; ++j)
      if (j != i)
        interference += powers[1 + j] * ground_gain(inst.pairs[j].first,
                                                    inst.pairs[i].second,
                                                    inst.fade_dd[i][j]);
    const double own = powers[1 + i] * ground_gain(inst.pairs[i].first,
                                                   inst.pairs[i].second,
                                                   inst.fade_dd[i][i]);
    total += std::log2(1.0 + own / (noise + interference));
  }
  return total;
}

BsInstance fixed_pair_instance(const BsConfig& cfg, std::uint64_t seed) {
  BsConfig two = cfg;
  two.d2d_density_per_m2 = 2e-6;  // mean 2 pairs
  for (std::uint64_t s = seed;; ++s) {
    BsInstance inst = draw_instance(two, s);
    if (inst.pair_count() == 2) return inst;
  }
}

}  // namespace

TEST_CASE("draw_instance respects density, geometry, and the seed", "[bs]") {
  BsConfig cfg;

  cfg.d2d_density_per_m2 = 0.0;
  CHECK(draw_instance(cfg, 3).pair_count() == 0);

  cfg.d2d_density_per_m2 = 1e-5;
  const BsInstance a = draw_instance(cfg, 99);
  const BsInstance b = draw_instance(cfg, 99);
  REQUIRE(a.pair_count() == b.pair_count());
  REQUIRE(a.user == b.user);
  for (std::size_t i = 0; i < a.pair_count(); ++i) {
    REQUIRE(a.pairs[i].first == b.pairs[i].first);
    REQUIRE(a.pairs[i].second == b.pairs[i].second);
  }
  REQUIRE(a.fade_dd == b.fade_dd);

  // every pair within the distance cap, every node inside the area
  std::size_t pairs_seen = 0;
  for (std::uint64_t seed = 0; seed < 10000 && pairs_seen < 100000; ++seed) {
    const BsInstance inst = draw_instance(cfg, seed);
    pairs_seen += inst.pair_count();
    for (const auto& [tx, rx] : inst.pairs) {
      REQUIRE(distance(tx, rx) <= cfg.d2d_max_distance_m + 1e-9);
      REQUIRE(cfg.area.contains(tx));
      REQUIRE(cfg.area.contains(rx));
    }
  }
  REQUIRE(pairs_seen > 1000);
}

TEST_CASE("sum_throughput matches an independent recomputation", "[bs]") {
  BsConfig cfg;
  const BsInstance inst = fixed_pair_instance(cfg, 1234);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double h = rng.uniform(cfg.height_min_m, cfg.height_max_m);
    const std::vector<double> powers{rng.uniform(0.0, cfg.uav_power_max_w),
                                     rng.uniform(0.0, cfg.d2d_power_max_w),
                                     rng.uniform(0.0, cfg.d2d_power_max_w)};
    bool ref_feasible = false;
    const double ref = recompute_sum_tput(inst, cfg, h, powers, &ref_feasible);
    const BsEvaluation got = sum_throughput(inst, h, powers, cfg);
    REQUIRE_THAT(got.sum_tput, Catch::Matchers::WithinRel(ref, 1e-9));
    REQUIRE(got.feasible == ref_feasible);
  }
}

TEST_CASE("without pairs the throughput falls monotonically with height", "[bs]") {
  BsConfig cfg;
  cfg.d2d_density_per_m2 = 0.0;
  const BsInstance inst = draw_instance(cfg, 7);
  const std::vector<double> powers{cfg.uav_power_max_w};
  double prev = 1e300;
  for (double h : height_lattice(cfg)) {
    const double v = sum_throughput(inst, h, powers, cfg).sum_tput;
    REQUIRE(v < prev);
    prev = v;
  }
}

TEST_CASE("all-zero powers give zero throughput and an unmet constraint", "[bs]") {
  BsConfig cfg;
  const BsInstance inst = draw_instance(cfg, 11);
  const std::vector<double> zeros(inst.pair_count() + 1, 0.0);
  const BsEvaluation eval = sum_throughput(inst, 300.0, zeros, cfg);
  CHECK(eval.sum_tput == 0.0);
  CHECK_FALSE(eval.feasible);
}

TEST_CASE("power caps are enforced", "[bs]") {
  BsConfig cfg;
  const BsInstance inst = draw_instance(cfg, 13);
  std::vector<double> powers(inst.pair_count() + 1, 0.0);
  powers[0] = cfg.uav_power_max_w * 1.01;
  REQUIRE_THROWS_AS(sum_throughput(inst, 100.0, powers, cfg), invalid_parameter);
  if (inst.pair_count() > 0) {
    powers[0] = 1.0;
    powers[1] = cfg.d2d_power_max_w * 1.01;
    REQUIRE_THROWS_AS(sum_throughput(inst, 100.0, powers, cfg), invalid_parameter);
  }
}

TEST_CASE("raising the UAV power never breaks the user constraint", "[bs]") {
  BsConfig cfg;
  Rng rng(17);
  const BsInstance inst = draw_instance(cfg, 19);
  const std::size_t k = inst.pair_count();
  REQUIRE(k > 0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> powers(k + 1);
    powers[0] = rng.uniform(0.0, cfg.uav_power_max_w * 0.5);
    for (std::size_t i = 1; i <= k; ++i)
      powers[i] = rng.uniform(0.0, cfg.d2d_power_max_w);
    const double h = rng.uniform(cfg.height_min_m, cfg.height_max_m);
    if (!sum_throughput(inst, h, powers, cfg).feasible) continue;
    powers[0] = std::min(cfg.uav_power_max_w, powers[0] * 2.0);
    REQUIRE(sum_throughput(inst, h, powers, cfg).feasible);
  }
}

TEST_CASE("with no pairs the optimizer picks the floor height at full power",
          "[bs]") {
  BsConfig cfg;
  cfg.d2d_density_per_m2 = 0.0;
  const BsInstance inst = draw_instance(cfg, 23);
  const BsOptimum best = optimize_bs(inst, cfg);
  REQUIRE(best.feasible);
  CHECK(best.height_m == cfg.height_min_m);
  REQUIRE(best.powers.size() == 1);
  CHECK(best.powers[0] == cfg.uav_power_max_w);
}

TEST_CASE("an unattainable SINR target yields an infeasibility report", "[bs]") {
  BsConfig cfg;
  cfg.sinr_threshold = 1e18;
  const BsInstance inst = draw_instance(cfg, 29);
  const BsOptimum best = optimize_bs(inst, cfg);
  CHECK_FALSE(best.feasible);
}

TEST_CASE("optimizer output honors caps and the SINR constraint", "[bs]") {
  BsConfig cfg;
  for (std::uint64_t seed = 40; seed < 48; ++seed) {
    const BsInstance inst = draw_instance(cfg, seed);
    const BsOptimum best = optimize_bs(inst, cfg);
    REQUIRE(best.feasible);
    REQUIRE(best.powers[0] <= cfg.uav_power_max_w + 1e-12);
    for (std::size_t i = 1; i < best.powers.size(); ++i)
      REQUIRE(best.powers[i] <= cfg.d2d_power_max_w + 1e-12);
    const BsEvaluation eval = sum_throughput(inst, best.height_m, best.powers, cfg);
    REQUIRE(eval.feasible);
    REQUIRE_THAT(eval.sum_tput, Catch::Matchers::WithinRel(best.tput, 1e-6));
  }
}

TEST_CASE("optimizer tracks the exhaustive oracle on 2-pair instances",
          "[bs][oracle]") {
  BsConfig cfg;
  cfg.height_points = 16;
  for (std::uint64_t seed = 300; seed < 303; ++seed) {
    const BsInstance inst = fixed_pair_instance(cfg, seed * 17 + 1);
    double oracle = -1.0;
    const int levels = 16;
    for (double h : height_lattice(cfg)) {
      for (int a = 0; a < levels; ++a)
        for (int b = 0; b < levels; ++b)
          for (int c = 0; c < levels; ++c) {
            const std::vector<double> powers{
                cfg.uav_power_max_w * a / (levels - 1),
                cfg.d2d_power_max_w * b / (levels - 1),
                cfg.d2d_power_max_w * c / (levels - 1)};
            bool ok = false;
            const double v = recompute_sum_tput(inst, cfg, h, powers, &ok);
            if (ok && v > oracle) oracle = v;
          }
    }
    REQUIRE(oracle > 0.0);
    const BsOptimum best = optimize_bs(inst, cfg);
    REQUIRE(best.feasible);
    REQUIRE(best.tput >= oracle * 0.98);
  }
}

TEST_CASE("sweep_heights emits one row per density and height", "[bs]") {
  BsConfig cfg;
  cfg.trials = 4;
  cfg.height_points = 8;
  const std::vector<double> lambdas{5e-6, 1e-5};
  const auto rows = sweep_heights(cfg, lambdas, 2);
  REQUIRE(rows.size() == lambdas.size() * 8);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].trials == 4);
    REQUIRE(rows[i].outage_frac >= 0.0);
    REQUIRE(rows[i].mean_tput >= 0.0);
  }
  // identical runs agree regardless of the worker count
  const auto rows1 = sweep_heights(cfg, lambdas, 1);
  REQUIRE(rows1.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows1[i].mean_tput == rows[i].mean_tput);
    REQUIRE(rows1[i].stderr_tput == rows[i].stderr_tput);
  }
}
