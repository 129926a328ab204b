#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smpc/bench.hpp"
#include "smpc/scenario.hpp"

namespace {

struct TimingArgs {
  std::string config;
  std::vector<int> samples = {64, 256, 1024, 4096};
  int trials = 50;
  int workers = 0;
  std::string strategy;  // empty runs all three
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "timing.csv";
};

struct SweepArgs {
  std::string config;
  std::vector<int> samples = {64, 256, 1024, 4096};
  std::vector<double> gammas = {0.2, 0.4, 0.6, 0.8, 1.0};
  int trials = 50;
  int steps = 1000;
  int workers = 0;
  std::string strategy = "auto";
  uint64_t seed = 0;
  std::string out = "dmd_sweep.csv";
};

smpc::StrategyChoice::Kind strategy_kind(const std::string& name) {
  if (name == "split") return smpc::StrategyChoice::Kind::kSplit;
  if (name == "fused") return smpc::StrategyChoice::Kind::kFused;
  return smpc::StrategyChoice::Kind::kAuto;
}

int run_timing(const TimingArgs& args) {
  smpc::ScenarioConfig scenario =
      args.config.empty() ? smpc::default_timing_scenario() : smpc::load_scenario(args.config);
  if (args.seed_set) scenario.rng_seed = args.seed;

  smpc::TimingOptions options;
  options.sample_counts = args.samples;
  options.trials = args.trials;
  options.workers = args.workers;
  if (!args.strategy.empty()) options.strategies = {args.strategy};

  const std::vector<smpc::TimingRecord> records = smpc::bench_timing(scenario, options);
  std::printf("%8s  %-6s  %-8s  %12s  %10s\n", "samples", "method", "strategy", "mean_ms",
              "std_ms");
  for (const auto& r : records) {
    std::printf("%8d  %-6s  %-8s  %12.4f  %10.4f\n", r.samples, r.method.c_str(),
                r.strategy.c_str(), r.mean_ms, r.std_ms);
  }
  smpc::write_timing_csv(args.out, records);
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

int run_sweep(const SweepArgs& args) {
  smpc::ScenarioConfig scenario =
      args.config.empty() ? smpc::default_sweep_scenario() : smpc::load_scenario(args.config);

  smpc::SweepOptions options;
  options.sample_counts = args.samples;
  options.gammas = args.gammas;
  options.trials = args.trials;
  options.steps = args.steps;
  options.base_seed = args.seed;
  options.workers = args.workers;
  options.strategy = strategy_kind(args.strategy);

  const std::vector<smpc::SweepRecord> records = smpc::bench_dmd_sweep(scenario, options);
  std::printf("%8s  %6s  %14s  %12s  %10s\n", "samples", "gamma", "mean_cost", "std_cost",
              "mean_ms");
  for (const auto& r : records) {
    std::printf("%8d  %6.2f  %14.2f  %12.2f  %10.4f\n", r.samples, r.gamma, r.mean_cost,
                r.std_cost, r.mean_ms);
  }
  for (const auto& [samples, gamma] : smpc::best_gamma_per_samples(records)) {
    std::printf("best gamma for %d samples: %.2f\n", samples, gamma);
  }
  smpc::write_sweep_csv(args.out, records);
  std::printf("wrote %s\n", args.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sampling-based MPC benchmarks: solve latency and step-size sweeps"};
  app.require_subcommand(1);

  TimingArgs timing_args;
  CLI::App* timing = app.add_subcommand("timing", "Per-solve latency versus sample count");
  timing->add_option("--config", timing_args.config,
                     "Scenario JSON (default: built-in goal-seeking scenario)");
  timing->add_option("--samples", timing_args.samples, "Comma-separated sample counts")
      ->delimiter(',');
  timing->add_option("--trials", timing_args.trials, "Timed solves per cell (>= 30)");
  timing->add_option("--workers", timing_args.workers, "Worker threads (0 = hardware)");
  timing->add_option("--strategy", timing_args.strategy, "Run only this strategy")
      ->check(CLI::IsMember({"split", "fused", "auto"}));
  timing->add_option("--seed", timing_args.seed, "Override the scenario RNG seed")
      ->each([&](const std::string&) { timing_args.seed_set = true; });
  timing->add_option("--out", timing_args.out, "Output CSV path");

  SweepArgs sweep_args;
  CLI::App* sweep =
      app.add_subcommand("dmd-sweep", "Closed-loop cost versus update step size");
  sweep->add_option("--config", sweep_args.config,
                    "Scenario JSON (default: built-in orbit-holding scenario)");
  sweep->add_option("--samples", sweep_args.samples, "Comma-separated sample counts")
      ->delimiter(',');
  sweep->add_option("--gammas", sweep_args.gammas, "Comma-separated step sizes in (0, 1]")
      ->delimiter(',');
  sweep->add_option("--trials", sweep_args.trials, "Seeded runs per (samples, gamma) cell");
  sweep->add_option("--steps", sweep_args.steps, "Closed-loop steps per run");
  sweep->add_option("--workers", sweep_args.workers, "Worker threads (0 = hardware)");
  sweep->add_option("--strategy", sweep_args.strategy, "Rollout strategy")
      ->check(CLI::IsMember({"split", "fused", "auto"}));
  sweep->add_option("--seed", sweep_args.seed, "Base RNG seed");
  sweep->add_option("--out", sweep_args.out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return timing->parsed() ? run_timing(timing_args) : run_sweep(sweep_args);
  } catch (const smpc::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
