#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "smpc/costs.hpp"
#include "smpc/dynamics.hpp"
#include "smpc/sampling.hpp"
#include "smpc/types.hpp"
#include "smpc/worker_pool.hpp"

namespace smpc {

enum class EvalStrategy { kSplit, kFused };

struct StrategyTimings {
  double split_median_ms = 0.0;
  double fused_median_ms = 0.0;
};

struct StrategyChoice {
  enum class Kind { kSplit, kFused, kAuto };
  Kind kind = Kind::kAuto;
  // Present when the choice came from an auto-tune run.
  std::optional<StrategyTimings> timings;
};

struct EngineConfig {
  // <= 0 selects the hardware concurrency.
  int num_workers = 0;
  StrategyChoice::Kind strategy = StrategyChoice::Kind::kAuto;
  // Timed rollouts per strategy during auto-tuning (at least 3; two untimed
  // warmups are added on top).
  int autotune_trials = 3;
  // Per-worker scratch allowance for the fused path; exceeding it forces the
  // split strategy, mirroring accelerator shared-memory limits.
  size_t fused_scratch_budget_bytes = 32 * 1024;
  // Millisecond clock used for auto-tuning; null uses the steady clock.
  std::function<double()> clock_ms;
};

/// One batched rollout evaluation: S systems (1, or 2 for tube variants)
/// sharing a noise batch, each with its own initial state and mean sequence.
struct RolloutRequest {
  const DynamicsModel* dynamics = nullptr;
  const CostFunction* cost = nullptr;
  std::vector<StateVector> initial_states;
  std::vector<ControlTrajectory> means;
  const NoiseBatch* noise = nullptr;
  // Optional per-system, per-sample additive cost terms (importance-sampling
  // corrections); applied before the exponential weight transform.
  std::vector<std::vector<double>> cost_adjustments;
};

/// Flat [system][sample][timestep][channel] output storage.
struct OutputBuffer {
  int num_systems = 0;
  int num_samples = 0;
  int horizon = 0;
  int output_dim = 0;
  std::vector<float> data;

  const float* at(int s, int m, int t) const {
    return &data[(((static_cast<size_t>(s) * num_samples + m) * horizon) + t) * output_dim];
  }
  float* at(int s, int m, int t) {
    return &data[(((static_cast<size_t>(s) * num_samples + m) * horizon) + t) * output_dim];
  }
  OutputTrajectory trajectory(int s, int m) const;
};

struct RolloutResult {
  int num_systems = 0;
  int num_samples = 0;
  int horizon = 0;
  EvalStrategy strategy = EvalStrategy::kSplit;
  // Total trajectory cost per system and sample, including any requested
  // cost adjustments. Accumulated in double in fixed timestep order.
  std::vector<std::vector<double>> costs;
  // Populated by the split strategy; absent under fused evaluation.
  std::optional<OutputBuffer> outputs;
};

struct WeightResult {
  double baseline = 0.0;
  double normalizer = 0.0;
  std::vector<double> weights;
};

/// Data-parallel rollout evaluator. The split strategy propagates dynamics
/// for all samples first and then scores the stored outputs with
/// (sample, timestep) parallelism; the fused strategy interleaves stepping
/// and scoring per sample without retaining trajectories. Both produce
/// bit-identical costs for a given request at any worker count.
class RolloutEngine {
 public:
  explicit RolloutEngine(EngineConfig config = {});

  const EngineConfig& config() const { return config_; }
  WorkerPool& pool() { return *pool_; }

  /// Evaluates with the configured strategy, auto-tuning first if needed.
  RolloutResult rollout(const RolloutRequest& request);

  RolloutResult rollout_split(const RolloutRequest& request);
  RolloutResult rollout_fused(const RolloutRequest& request);

  /// Times both strategies on the given request (median over timed trials,
  /// after two warmups each) and locks in the faster one. Ties and
  /// over-budget fused scratch select split.
  StrategyChoice auto_select(const RolloutRequest& representative, int trials = 0);

  void set_strategy(StrategyChoice::Kind kind);
  const StrategyChoice& strategy() const { return choice_; }
  /// The concrete strategy the next rollout will use; auto-tunes when the
  /// configured choice is still kAuto.
  EvalStrategy resolved_strategy(const RolloutRequest& representative);

  static size_t fused_scratch_bytes(const RolloutRequest& request);

  /// Softmin weight transform: baseline rho = min(costs), normalizer
  /// eta = sum(exp(-(J - rho) / lambda)), weights sum to 1.
  static WeightResult compute_weights(std::span<const double> costs, double lambda);

  /// New mean: u_t + step_size_t * sum_m w_m eps(m, t). Step sizes may be
  /// empty (1 everywhere), a single value, or one per timestep; an update
  /// with step size 1 is exactly the unscaled weighted average.
  static ControlTrajectory weighted_update(const ControlTrajectory& mean, const NoiseBatch& batch,
                                           const WeightResult& weights,
                                           std::span<const float> step_sizes = {});

  /// The ceil(fraction * M) lowest-cost output trajectories of system 0,
  /// ties broken by lower sample index. Re-rolls the selected samples when
  /// the result holds no stored outputs.
  std::vector<OutputTrajectory> export_sample_trajectories(const RolloutRequest& request,
                                                           const RolloutResult& result,
                                                           double fraction);

 private:
  void validate(const RolloutRequest& request) const;
  void run_sample_fused(const RolloutRequest& request, const float* mean_base, int m, int s,
                        double& cost_out, float* output_sink) const;

  EngineConfig config_;
  std::unique_ptr<WorkerPool> pool_;
  StrategyChoice choice_;
  std::optional<EvalStrategy> resolved_;
};

}  // namespace smpc
