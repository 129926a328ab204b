#include "smpc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "smpc/controllers.hpp"
#include "smpc/plant.hpp"

namespace smpc {
namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& values) {
  Stats s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

StrategyChoice::Kind parse_strategy(const std::string& name) {
  if (name == "split") return StrategyChoice::Kind::kSplit;
  if (name == "fused") return StrategyChoice::Kind::kFused;
  if (name == "auto") return StrategyChoice::Kind::kAuto;
  throw ConfigError("strategy '" + name + "' is not recognized (split, fused, auto)");
}

}  // namespace

std::vector<TimingRecord> bench_timing(const ScenarioConfig& scenario,
                                       const TimingOptions& options) {
  if (options.trials < 30) throw Error("bench_timing: need at least 30 trials");
  if (options.sample_counts.empty() || options.strategies.empty()) {
    throw Error("bench_timing: sample counts and strategies must be non-empty");
  }

  std::vector<TimingRecord> records;
  for (int samples : options.sample_counts) {
    if (samples < 1) throw Error("bench_timing: sample counts must be >= 1");
    for (const std::string& strategy : options.strategies) {
      ScenarioConfig run = scenario;
      run.num_samples = samples;
      EngineConfig engine;
      engine.num_workers = options.workers;
      engine.strategy = parse_strategy(strategy);
      std::unique_ptr<Controller> controller = make_controller(run, std::move(engine));
      const StateVector x0 =
          controller->dynamics().state_from_named_values(run.initial_state);

      for (int i = 0; i < 2; ++i) controller->compute_control(x0);
      std::vector<double> times;
      times.reserve(static_cast<size_t>(options.trials));
      for (int i = 0; i < options.trials; ++i) {
        const double t0 = now_ms();
        controller->compute_control(x0);
        times.push_back(now_ms() - t0);
      }
      const Stats s = stats_of(times);
      records.push_back(TimingRecord{samples, controller->name(), strategy, s.mean, s.stddev,
                                     options.trials});
    }
  }
  return records;
}

std::vector<SweepRecord> bench_dmd_sweep(const ScenarioConfig& scenario,
                                         const SweepOptions& options) {
  if (options.trials < 1) throw Error("bench_dmd_sweep: need at least 1 trial");
  if (options.steps < 1) throw Error("bench_dmd_sweep: need at least 1 step");
  if (options.sample_counts.empty() || options.gammas.empty()) {
    throw Error("bench_dmd_sweep: sample counts and gammas must be non-empty");
  }
  for (double gamma : options.gammas) {
    if (!(gamma > 0.0 && gamma <= 1.0)) {
      throw Error("bench_dmd_sweep: gammas must be in (0, 1]");
    }
  }

  std::vector<SweepRecord> records;
  for (int samples : options.sample_counts) {
    if (samples < 1) throw Error("bench_dmd_sweep: sample counts must be >= 1");
    for (double gamma : options.gammas) {
      std::vector<double> costs;
      std::vector<double> solve_ms;
      costs.reserve(static_cast<size_t>(options.trials));
      for (int trial = 0; trial < options.trials; ++trial) {
        ScenarioConfig run = scenario;
        run.num_samples = samples;
        run.controller.kind = "dmd";
        run.controller.step_size = gamma;
        run.controller.step_size_per_step.clear();
        run.rng_seed = options.base_seed + static_cast<uint64_t>(trial);

        EngineConfig engine;
        engine.num_workers = options.workers;
        engine.strategy = options.strategy;
        std::shared_ptr<Controller> controller = make_controller(run, std::move(engine));
        Plant plant = make_plant(run, controller);
        SimulatedSystem sim = make_simulated_system(run);

        const double duration = options.steps * run.dt;
        const LoopResult result = plant.run_control_loop(sim, duration);
        costs.push_back(result.accumulated_cost);
        solve_ms.push_back(result.mean_solve_ms);
      }
      const Stats cost_stats = stats_of(costs);
      const Stats ms_stats = stats_of(solve_ms);
      records.push_back(SweepRecord{samples, gamma, cost_stats.mean, cost_stats.stddev,
                                    ms_stats.mean, options.trials});
    }
  }
  return records;
}

std::vector<std::pair<int, double>> best_gamma_per_samples(
    const std::vector<SweepRecord>& records) {
  std::vector<int> order;
  std::map<int, const SweepRecord*> best;
  for (const SweepRecord& r : records) {
    auto [it, inserted] = best.try_emplace(r.samples, &r);
    if (inserted) {
      order.push_back(r.samples);
    } else if (r.mean_cost < it->second->mean_cost ||
               (r.mean_cost == it->second->mean_cost && r.gamma < it->second->gamma)) {
      it->second = &r;
    }
  }
  std::vector<std::pair<int, double>> result;
  result.reserve(order.size());
  for (int samples : order) result.emplace_back(samples, best.at(samples)->gamma);
  return result;
}

void write_timing_csv(const std::string& path, const std::vector<TimingRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "samples,method,strategy,mean_ms,std_ms,trials\n";
  char buf[160];
  for (const TimingRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%s,%.9g,%.9g,%d\n", r.samples, r.method.c_str(),
                  r.strategy.c_str(), r.mean_ms, r.std_ms, r.trials);
    out << buf;
  }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << "samples,gamma,mean_cost,std_cost,mean_ms,trials\n";
  char buf[160];
  for (const SweepRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g,%d\n", r.samples, r.gamma,
                  r.mean_cost, r.std_cost, r.mean_ms, r.trials);
    out << buf;
  }
}

ScenarioConfig default_timing_scenario() {
  ScenarioConfig scenario;
  scenario.dynamics.kind = "diff_drive";
  scenario.cost.kind = "diff_drive_nav";
  scenario.controller.kind = "mppi";
  scenario.initial_state = {{"X", -2.0}, {"Y", -2.0}};
  return scenario;
}

ScenarioConfig default_sweep_scenario() {
  ScenarioConfig scenario;
  scenario.dt = 0.02;
  scenario.horizon = 32;
  scenario.lambda = 1.0;
  scenario.control_std = {1.0, 1.0};
  scenario.sampler.importance_sampling = false;
  scenario.dynamics.kind = "double_integrator";
  scenario.cost.kind = "circle_track";
  scenario.controller.kind = "dmd";
  scenario.controller.step_size = 1.0;
  scenario.plant.replan_rate = 50.0;
  scenario.plant.dt_min = 0.02;
  scenario.initial_state = {{"X", 2.0}, {"V_Y", 2.0}};
  return scenario;
}

}  // namespace smpc
