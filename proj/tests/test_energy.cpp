#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "udn/energy.hpp"

using namespace udn;

namespace {
const PropulsionParams kProp{};  // c1 = 9.26e-4, c2 = 2250
}

TEST_CASE("propulsion power matches the level-flight law", "[energy]") {
  CHECK_THAT(propulsion_power(30.0, kProp),
             Catch::Matchers::WithinRel(100.002, 1e-9));
  CHECK(propulsion_power(0.1, kProp) > propulsion_power(30.0, kProp));
  CHECK(propulsion_power(1000.0, kProp) > propulsion_power(30.0, kProp));
  REQUIRE_THROWS_AS(propulsion_power(0.0, kProp), invalid_parameter);
  REQUIRE_THROWS_AS(propulsion_power(-5.0, kProp), invalid_parameter);
}

TEST_CASE("max-endurance speed agrees with dense grid minimization", "[energy]") {
  const double vstar = max_endurance_speed(kProp);
  CHECK_THAT(vstar, Catch::Matchers::WithinAbs(30.0, 1e-2));

  const int points = 4000;
  double best_v = 1.0, best_p = propulsion_power(1.0, kProp);
  const double step = (200.0 - 1.0) / (points - 1);
  for (int i = 1; i < points; ++i) {
    const double v = 1.0 + step * i;
    const double p = propulsion_power(v, kProp);
    if (p < best_p) {
      best_p = p;
      best_v = v;
    }
  }
  CHECK(std::abs(best_v - vstar) <= step);
}

TEST_CASE("propulsion power is strictly convex on a grid", "[energy]") {
  double prev_slope = -1e300;
  for (double v = 2.0; v < 200.0; v += 2.0) {
    const double slope = propulsion_power(v + 1.0, kProp) - propulsion_power(v, kProp);
    REQUIRE(slope > prev_slope);
    prev_slope = slope;
  }
}

namespace {
Trajectory constant_speed_line(double speed, double duration, double slot) {
  Trajectory t;
  t.slot_s = slot;
  const auto slots = static_cast<std::size_t>(duration / slot);
  for (std::size_t n = 0; n <= slots; ++n)
    t.positions.push_back({speed * slot * n, 0.0, 100.0});
  return t;
}
}  // namespace

TEST_CASE("flight energy integrates propulsion power over slots", "[energy]") {
  const Trajectory t = constant_speed_line(30.0, 100.0, 1.0);
  CHECK_THAT(flight_energy(t, kProp),
             Catch::Matchers::WithinRel(10000.2, 1e-9));

  const Trajectory t2 = constant_speed_line(30.0, 200.0, 1.0);
  CHECK_THAT(flight_energy(t2, kProp),
             Catch::Matchers::WithinRel(2.0 * flight_energy(t, kProp), 1e-12));

  Trajectory too_short;
  too_short.positions = {{0, 0, 100}};
  REQUIRE_THROWS_AS(flight_energy(too_short, kProp), invalid_parameter);
}

TEST_CASE("flight energy depends on speed only, not path shape", "[energy]") {
  // same constant speed and duration, different shapes
  Trajectory line = constant_speed_line(20.0, 50.0, 1.0);
  Trajectory zigzag;
  zigzag.slot_s = 1.0;
  Point3 p{0, 0, 100};
  zigzag.positions.push_back(p);
  for (int n = 0; n < 50; ++n) {
    (n % 2 == 0 ? p.x : p.y) += 20.0;
    zigzag.positions.push_back(p);
  }
  CHECK_THAT(flight_energy(zigzag, kProp),
             Catch::Matchers::WithinRel(flight_energy(line, kProp), 1e-12));
}

TEST_CASE("flight energy is bounded below by max-endurance power", "[energy]") {
  Rng rng(400);
  const double floor_power = propulsion_power(max_endurance_speed(kProp), kProp);
  for (int trial = 0; trial < 100; ++trial) {
    Trajectory t;
    t.slot_s = 1.0;
    Point3 p{0, 0, 100};
    t.positions.push_back(p);
    const int slots = 2 + static_cast<int>(rng.uniform_index(40));
    for (int n = 0; n < slots; ++n) {
      p.x += rng.uniform(-60, 60);
      p.y += rng.uniform(-60, 60);
      t.positions.push_back(p);
    }
    REQUIRE(flight_energy(t, kProp) >= t.duration_s() * floor_power - 1e-9);
  }
}

TEST_CASE("hover slots are charged at max-endurance power", "[energy]") {
  Trajectory t;
  t.slot_s = 2.0;
  t.positions = {{0, 0, 100}, {0, 0, 100}, {0, 0, 100}};
  const double loiter = propulsion_power(max_endurance_speed(kProp), kProp);
  CHECK_THAT(flight_energy(t, kProp),
             Catch::Matchers::WithinRel(2.0 * 2.0 * loiter, 1e-12));
}

TEST_CASE("harvested energy matches the hand-computed hover case", "[energy]") {
  ChannelParams channel;  // beta0 = 1e-6
  HarvestParams harvest;  // eta = 0.5
  Trajectory hover;
  hover.slot_s = 1.0;
  hover.positions.assign(11, Point3{500, 500, 100});
  NodeSet nodes;
  nodes.positions = {{500, 500, 0}};
  const std::vector<double> schedule(10, 5.0);
  const auto energy = harvested_energy(hover, schedule, nodes, channel, harvest);
  REQUIRE(energy.size() == 1);
  CHECK_THAT(energy[0], Catch::Matchers::WithinRel(2.5e-9, 1e-12));
}

TEST_CASE("harvested energy is linear in the schedule", "[energy]") {
  ChannelParams channel;
  HarvestParams harvest;
  const AreaSpec area{1000, 1000};
  const Trajectory t = build_trajectory(PathKind::straight, area, 100, 25, 40, 1);
  const NodeSet nodes = make_grid(area, 4, 4);

  const std::vector<double> zeros(t.slot_count(), 0.0);
  for (double e : harvested_energy(t, zeros, nodes, channel, harvest))
    REQUIRE(e == 0.0);

  std::vector<double> sched(t.slot_count());
  Rng rng(9);
  for (auto& p : sched) p = rng.uniform(0.0, 5.0);
  std::vector<double> tripled = sched;
  for (auto& p : tripled) p *= 3.0;

  const auto base = harvested_energy(t, sched, nodes, channel, harvest);
  const auto three = harvested_energy(t, tripled, nodes, channel, harvest);
  for (std::size_t k = 0; k < base.size(); ++k)
    REQUIRE_THAT(three[k], Catch::Matchers::WithinRel(3.0 * base[k], 1e-12));

  const std::vector<double> wrong(t.slot_count() + 1, 1.0);
  REQUIRE_THROWS_AS(harvested_energy(t, wrong, nodes, channel, harvest),
                    invalid_parameter);
}

TEST_CASE("moving a node away from the path only loses energy", "[energy]") {
  ChannelParams channel;
  HarvestParams harvest;
  const AreaSpec area{1000, 1000};
  const Trajectory t = build_trajectory(PathKind::straight, area, 100, 25, 40, 1);
  const std::vector<double> sched(t.slot_count(), 5.0);

  // walk a node radially away from the path's centroid
  double prev = 1e300;
  for (double offset = 0.0; offset <= 2000.0; offset += 250.0) {
    NodeSet nodes;
    nodes.positions = {{500, 500 + offset, 0}};
    const auto e = harvested_energy(t, sched, nodes, channel, harvest);
    REQUIRE(e[0] < prev);
    prev = e[0];
  }
}
