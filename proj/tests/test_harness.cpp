#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "udn/harness.hpp"

using namespace udn;

namespace {

ExperimentSpec parse_or_fail(const std::string& text) {
  ParseOutcome out = parse_spec(text);
  INFO("spec: " << text);
  for (const auto& e : out.errors)
    UNSCOPED_INFO("line " << e.line << " " << e.key << ": " << e.message);
  REQUIRE(out.ok());
  return *out.spec;
}

std::vector<std::string> csv_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("a single lattice point with one trial yields a single row",
          "[harness]") {
  const ExperimentSpec spec = parse_or_fail(
      "scenario = relay\n"
      "relay.slots = 20\n"
      "relay.horizon_s = 40\n");
  const MetricReport report = run_experiment(spec);
  REQUIRE(report.rows.size() == 1);
  REQUIRE(report.header.front() == "scenario");
  REQUIRE(report.header.back() == "error");
}

TEST_CASE("identical specs give byte-identical CSV", "[harness]") {
  const std::string text =
      "scenario = cache\n"
      "trials = 3\n"
      "seed = 77\n"
      "cache.users = 60\n"
      "cache.duration_s = 120\n"
      "cache.request_rate_hz = 0.05\n";
  const MetricReport a = run_experiment(parse_or_fail(text), {.jobs = 2});
  const MetricReport b = run_experiment(parse_or_fail(text), {.jobs = 2});
  REQUIRE(to_csv(a) == to_csv(b));
}

TEST_CASE("worker count never changes the output", "[harness]") {
  const std::string text =
      "scenario = cache\n"
      "trials = 5\n"
      "seed = 5\n"
      "cache.users = 50\n"
      "cache.duration_s = 90\n"
      "sweep cache.d2d_radius_m = 50 150\n";
  const ExperimentSpec spec = parse_or_fail(text);
  const MetricReport serial = run_experiment(spec, {.jobs = 1});
  const MetricReport parallel = run_experiment(spec, {.jobs = 8});
  REQUIRE(to_csv(serial) == to_csv(parallel));
}

TEST_CASE("lattice rows appear in sweep-then-trial order", "[harness]") {
  const std::string text =
      "scenario = cache\n"
      "trials = 2\n"
      "cache.users = 30\n"
      "cache.duration_s = 60\n"
      "cache.policy = tracking\n"
      "sweep cache.contents = 5 10\n"
      "sweep cache.d2d_radius_m = 40 80\n";
  const MetricReport report = run_experiment(parse_or_fail(text));
  // 2 contents x 2 radii x 2 trials x 1 policy
  REQUIRE(report.rows.size() == 8);
  const auto content_of = [&](std::size_t r) {
    return std::get<std::int64_t>(report.rows[r][2]);
  };
  CHECK(content_of(0) == 5);
  CHECK(content_of(3) == 5);
  CHECK(content_of(4) == 10);
  CHECK(content_of(7) == 10);
}

TEST_CASE("permuting a sweep's value list permutes rows, nothing else",
          "[harness]") {
  const std::string fwd =
      "scenario = cache\n"
      "trials = 2\n"
      "seed = 11\n"
      "cache.users = 40\n"
      "cache.duration_s = 60\n"
      "sweep cache.contents = 4 8 16\n";
  const std::string rev =
      "scenario = cache\n"
      "trials = 2\n"
      "seed = 11\n"
      "cache.users = 40\n"
      "cache.duration_s = 60\n"
      "sweep cache.contents = 16 8 4\n";
  auto a = csv_lines(to_csv(run_experiment(parse_or_fail(fwd))));
  auto b = csv_lines(to_csv(run_experiment(parse_or_fail(rev))));
  REQUIRE(a.size() == b.size());
  REQUIRE(a != b);  // order differs...
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  REQUIRE(a == b);  // ...content does not
}

TEST_CASE("a failing lattice point yields an error row, not an abort",
          "[harness]") {
  // 60 s at 10 m/s cannot complete the sigmoid sweep; 600 s can
  const std::string text =
      "scenario = wet\n"
      "wet.grid_rows = 2\n"
      "wet.grid_cols = 2\n"
      "sweep wet.duration_s = 60 600\n";
  const MetricReport report = run_experiment(parse_or_fail(text));
  REQUIRE(report.rows.size() == 1 + 4);  // one error row + four node rows
  const auto& error_cell = report.rows[0].back();
  CHECK_FALSE(std::get<std::string>(error_cell).empty());
  for (std::size_t r = 1; r < report.rows.size(); ++r)
    CHECK(std::get<std::string>(report.rows[r].back()).empty());
}

TEST_CASE("schemas are stable golden headers", "[harness]") {
  auto header_of = [&](const std::string& text) {
    MetricReport r;
    r.header = harness_detail::schema_for(parse_or_fail(text));
    return to_csv(r);
  };
  CHECK(header_of("scenario = bs\n") ==
        "scenario,lambda,height_m,mean_tput_bpshz,stderr,outage_frac,trials,seed,error\n");
  CHECK(header_of("scenario = relay\n") ==
        "scenario,V_mps,T_s,N_slots,tput_bpshz,static_tput_bpshz,energy_J,"
        "ee_bits_per_hz_per_J,error\n");
  CHECK(header_of("scenario = wet\n") ==
        "scenario,trajectory,schedule,node_i,node_j,energy_J,energy_norm,error\n");
  CHECK(header_of("scenario = cache\n") ==
        "scenario,policy,N,U,self_hit,d2d_hit,uav_hit,bs_hit,mean_delay_s,seed,error\n");
  CHECK(header_of("scenario = cache\ncache.mode = surveillance\n") ==
        "scenario,sensors,collection_s,flight_s,transmission_s,total_delay_s,bits,error\n");
}

TEST_CASE("bs reports one row per height with aggregate statistics", "[harness]") {
  const std::string text =
      "scenario = bs\n"
      "trials = 2\n"
      "bs.height_points = 6\n"
      "bs.d2d_density_per_m2 = 5e-6\n";
  const MetricReport report = run_experiment(parse_or_fail(text), {.jobs = 4});
  REQUIRE(report.rows.size() == 6);
  for (const auto& row : report.rows) {
    CHECK(std::get<std::string>(row[0]) == "bs");
    CHECK(std::get<std::int64_t>(row[6]) == 2);  // trials column
  }
}

TEST_CASE("the child-seed chain is the documented mixing function", "[harness]") {
  const std::uint64_t master = 42, tag = 7, trial = 3;
  CHECK(experiment_child_seed(master, tag, trial) ==
        derive_seed(derive_seed(master, tag), trial));
  CHECK(experiment_child_seed(master, tag, trial) !=
        experiment_child_seed(master, tag, trial + 1));
}
