#include "doctest.h"
#include "smpc/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

using namespace smpc;

namespace {

ScenarioConfig tiny_sweep_scenario() {
  ScenarioConfig scenario = default_sweep_scenario();
  scenario.horizon = 5;
  return scenario;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_SUITE_BEGIN("bench");

TEST_CASE("stock scenarios are valid") {
  CHECK(validate(default_timing_scenario()).empty());
  CHECK(validate(default_sweep_scenario()).empty());
  CHECK(default_timing_scenario().dynamics.kind == "diff_drive");
  CHECK(default_sweep_scenario().dynamics.kind == "double_integrator");
}

TEST_CASE("timing run records one row per sample count and strategy") {
  ScenarioConfig scenario = tiny_sweep_scenario();
  scenario.controller.kind = "mppi";
  TimingOptions options;
  options.sample_counts = {4, 8};
  options.strategies = {"split", "fused", "auto"};
  options.trials = 30;
  options.workers = 1;

  const std::vector<TimingRecord> records = bench_timing(scenario, options);
  REQUIRE(records.size() == 6);
  int i = 0;
  for (int samples : {4, 8}) {
    for (const char* strategy : {"split", "fused", "auto"}) {
      CHECK(records[i].samples == samples);
      CHECK(records[i].method == "mppi");
      CHECK(records[i].strategy == strategy);
      CHECK(records[i].mean_ms > 0.0);
      CHECK(records[i].std_ms >= 0.0);
      CHECK(records[i].trials == 30);
      ++i;
    }
  }
}

TEST_CASE("timing run input validation") {
  const ScenarioConfig scenario = tiny_sweep_scenario();
  TimingOptions options;
  options.workers = 1;

  options.trials = 29;
  CHECK_THROWS_WITH_AS(bench_timing(scenario, options), doctest::Contains("30 trials"), Error);

  options.trials = 30;
  options.sample_counts = {};
  CHECK_THROWS_AS(bench_timing(scenario, options), Error);

  options.sample_counts = {0};
  CHECK_THROWS_AS(bench_timing(scenario, options), Error);

  options.sample_counts = {4};
  options.strategies = {"vectorized"};
  CHECK_THROWS_AS(bench_timing(scenario, options), ConfigError);
}

TEST_CASE("step-size sweep fills the full grid deterministically") {
  const ScenarioConfig scenario = tiny_sweep_scenario();
  SweepOptions options;
  options.sample_counts = {8};
  options.gammas = {0.5, 1.0};
  options.trials = 2;
  options.steps = 10;
  options.workers = 1;
  options.strategy = StrategyChoice::Kind::kFused;

  const std::vector<SweepRecord> records = bench_dmd_sweep(scenario, options);
  REQUIRE(records.size() == 2);
  CHECK(records[0].samples == 8);
  CHECK(records[0].gamma == 0.5);
  CHECK(records[1].gamma == 1.0);
  for (const SweepRecord& r : records) {
    CHECK(std::isfinite(r.mean_cost));
    CHECK(r.std_cost >= 0.0);
    CHECK(r.mean_ms > 0.0);
    CHECK(r.trials == 2);
  }

  // Seeds are derived from the options, so a rerun reproduces the costs.
  const std::vector<SweepRecord> again = bench_dmd_sweep(scenario, options);
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].mean_cost == again[i].mean_cost);
    CHECK(records[i].std_cost == again[i].std_cost);
  }

  // A different base seed gives a different draw of closed-loop runs.
  options.base_seed = 1234;
  const std::vector<SweepRecord> shifted = bench_dmd_sweep(scenario, options);
  CHECK(shifted[0].mean_cost != records[0].mean_cost);
}

TEST_CASE("step-size sweep input validation") {
  const ScenarioConfig scenario = tiny_sweep_scenario();
  SweepOptions options;
  options.sample_counts = {8};
  options.trials = 1;
  options.steps = 5;
  options.workers = 1;

  options.gammas = {0.0};
  CHECK_THROWS_AS(bench_dmd_sweep(scenario, options), Error);
  options.gammas = {1.5};
  CHECK_THROWS_AS(bench_dmd_sweep(scenario, options), Error);

  options.gammas = {1.0};
  options.steps = 0;
  CHECK_THROWS_AS(bench_dmd_sweep(scenario, options), Error);
  options.steps = 5;
  options.trials = 0;
  CHECK_THROWS_AS(bench_dmd_sweep(scenario, options), Error);
}

TEST_CASE("best gamma selection breaks ties toward the smaller gamma") {
  std::vector<SweepRecord> records;
  records.push_back(SweepRecord{1024, 0.5, 10.0, 0.0, 0.0, 1});
  records.push_back(SweepRecord{1024, 1.0, 5.0, 0.0, 0.0, 1});
  records.push_back(SweepRecord{64, 0.5, 7.0, 0.0, 0.0, 1});
  records.push_back(SweepRecord{64, 1.0, 7.0, 0.0, 0.0, 1});
  records.push_back(SweepRecord{1024, 0.2, 5.0, 0.0, 0.0, 1});

  const auto best = best_gamma_per_samples(records);
  REQUIRE(best.size() == 2);
  // Sample counts keep their first-seen order.
  CHECK(best[0].first == 1024);
  CHECK(best[0].second == 0.2);
  CHECK(best[1].first == 64);
  CHECK(best[1].second == 0.5);
}

TEST_CASE("csv formats") {
  const std::string timing_path = "/tmp/smpc_test_timing.csv";
  const std::string sweep_path = "/tmp/smpc_test_sweep.csv";

  std::vector<TimingRecord> timing;
  timing.push_back(TimingRecord{128, "mppi", "fused", 1.5, 0.25, 50});
  write_timing_csv(timing_path, timing);
  const std::vector<std::string> timing_lines = read_lines(timing_path);
  REQUIRE(timing_lines.size() == 2);
  CHECK(timing_lines[0] == "samples,method,strategy,mean_ms,std_ms,trials");
  CHECK(timing_lines[1] == "128,mppi,fused,1.5,0.25,50");

  std::vector<SweepRecord> sweep;
  sweep.push_back(SweepRecord{64, 0.8, 123.5, 4.25, 2.5, 50});
  write_sweep_csv(sweep_path, sweep);
  const std::vector<std::string> sweep_lines = read_lines(sweep_path);
  REQUIRE(sweep_lines.size() == 2);
  CHECK(sweep_lines[0] == "samples,gamma,mean_cost,std_cost,mean_ms,trials");
  CHECK(sweep_lines[1] == "64,0.8,123.5,4.25,2.5,50");

  std::remove(timing_path.c_str());
  std::remove(sweep_path.c_str());

  CHECK_THROWS_AS(write_timing_csv("/nonexistent/dir/t.csv", timing), Error);
  CHECK_THROWS_AS(write_sweep_csv("/nonexistent/dir/s.csv", sweep), Error);
}

TEST_SUITE_END();
