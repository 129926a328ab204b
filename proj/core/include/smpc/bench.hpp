#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "smpc/engine.hpp"
#include "smpc/scenario.hpp"

namespace smpc {

struct TimingRecord {
  int samples = 0;
  std::string method;
  std::string strategy;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  int trials = 0;
};

struct SweepRecord {
  int samples = 0;
  double gamma = 0.0;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double mean_ms = 0.0;
  int trials = 0;
};

struct TimingOptions {
  std::vector<int> sample_counts = {64, 256, 1024, 4096};
  // "split", "fused", and/or "auto".
  std::vector<std::string> strategies = {"split", "fused", "auto"};
  int trials = 50;
  int workers = 0;
};

/// Times compute_control of the scenario's controller at each sample count
/// and strategy: two untimed warmup solves (auto-tuning resolves there),
/// then `trials` timed solves from the scenario's initial state. Requires
/// trials >= 30 for stable statistics.
std::vector<TimingRecord> bench_timing(const ScenarioConfig& scenario,
                                       const TimingOptions& options);

struct SweepOptions {
  std::vector<int> sample_counts = {64, 256, 1024, 4096};
  std::vector<double> gammas = {0.2, 0.4, 0.6, 0.8, 1.0};
  // Independent closed-loop runs per (samples, gamma) cell, seeded
  // base_seed, base_seed + 1, ...
  int trials = 50;
  // Closed-loop steps per run, at the scenario dt.
  int steps = 1000;
  uint64_t base_seed = 0;
  int workers = 0;
  StrategyChoice::Kind strategy = StrategyChoice::Kind::kAuto;
};

/// Runs closed-loop step-size sweeps on the scenario (the controller kind is
/// forced to the step-size variant) and reports accumulated-cost statistics
/// per (samples, gamma) cell.
std::vector<SweepRecord> bench_dmd_sweep(const ScenarioConfig& scenario,
                                         const SweepOptions& options);

/// Lowest-mean-cost gamma per sample count, ties to the smaller gamma.
std::vector<std::pair<int, double>> best_gamma_per_samples(
    const std::vector<SweepRecord>& records);

/// CSV with header samples,method,strategy,mean_ms,std_ms,trials.
void write_timing_csv(const std::string& path, const std::vector<TimingRecord>& records);

/// CSV with header samples,gamma,mean_cost,std_cost,mean_ms,trials.
void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records);

/// Goal-seeking scenario on the bounded differential-drive model; the stock
/// subject for timing runs.
ScenarioConfig default_timing_scenario();

/// Planar point mass holding an annular orbit; the stock subject for
/// step-size sweeps.
ScenarioConfig default_sweep_scenario();

}  // namespace smpc
