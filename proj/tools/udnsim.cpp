#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "udn/harness.hpp"
#include "udn/spec_config.hpp"

namespace {

int load_and_parse(const std::string& spec_path, udn::ParseOutcome& outcome) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open spec file " << spec_path << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  outcome = udn::parse_spec(ss.str());
  for (const auto& e : outcome.errors) {
    std::cerr << spec_path << ":";
    if (e.line > 0) std::cerr << e.line << ":";
    std::cerr << " " << e.key << ": " << e.message << "\n";
  }
  return outcome.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV network power-control experiment runner"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  std::string map_out_path;
  std::uint64_t seed = 0;
  int trials = 0;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "run an experiment spec and write CSV");
  run->add_option("specfile", spec_path, "experiment spec file")->required();
  run->add_option("--out", out_path, "output CSV path (overrides the spec's `out`)");
  run->add_option("--seed", seed, "master seed override");
  run->add_option("--trials", trials, "trial count override");
  run->add_option("--jobs", jobs, "worker threads (output is identical for any value)")
      ->check(CLI::Range(1, 1024));
  run->add_option("--map-out", map_out_path,
                  "also write the dense normalized energy map (wet scenario)");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "parse and validate a spec, reporting every problem");
  validate_cmd->add_option("specfile", spec_path, "experiment spec file")->required();

  app.add_subcommand("list-scenarios", "list available scenario ids");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list-scenarios")) {
    std::cout << "bs      flying base station sharing spectrum with D2D pairs\n"
              << "relay   mobile relay between a separated source and destination\n"
              << "wet     wireless energy transfer over a ground node grid\n"
              << "cache   mobile content cache serving users, or sensor surveillance\n";
    return 0;
  }

  udn::ParseOutcome outcome;
  if (const int rc = load_and_parse(spec_path, outcome); rc != 0) return rc;

  if (app.got_subcommand("validate")) {
    std::cout << "ok: " << spec_path << " (scenario " << outcome.spec->scenario
              << ", " << outcome.spec->sweeps.size() << " sweep axes)\n";
    return 0;
  }

  // run
  udn::RunOptions options;
  options.jobs = jobs;
  if (run->count("--seed") > 0) options.seed_override = seed;
  if (run->count("--trials") > 0) options.trials_override = trials;
  if (!map_out_path.empty()) options.map_out = map_out_path;

  std::filesystem::path out = out_path;
  if (out.empty()) out = outcome.spec->out;
  if (out.empty()) out = std::filesystem::path(spec_path).filename().replace_extension(".csv");

  // re-validate trial overrides against scenario determinism rules
  if (options.trials_override && *options.trials_override != 1 &&
      (outcome.spec->scenario == "relay" || outcome.spec->scenario == "wet" ||
       (outcome.spec->scenario == "cache" &&
        outcome.spec->cache_mode == udn::CacheMode::surveillance))) {
    std::cerr << "error: scenario " << outcome.spec->scenario
              << " is deterministic; --trials must be 1\n";
    return 1;
  }

  try {
    const udn::MetricReport report = udn::run_experiment(*outcome.spec, options);
    udn::write_csv(report, out);
    std::size_t failed = 0;
    for (const auto& row : report.rows)
      if (!std::get<std::string>(row.back()).empty()) ++failed;
    std::cout << "wrote " << report.rows.size() << " rows to " << out.string()
              << (failed > 0 ? " (" + std::to_string(failed) + " error rows)" : "")
              << "\n";
    return failed > 0 ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
