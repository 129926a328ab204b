#pragma once

#include <memory>
#include <string>
#include <vector>

#include "smpc/costs.hpp"
#include "smpc/dynamics.hpp"
#include "smpc/engine.hpp"
#include "smpc/feedback.hpp"
#include "smpc/sampling.hpp"
#include "smpc/scenario.hpp"
#include "smpc/types.hpp"

namespace smpc {

struct ControllerSolution {
  // Optimized mean control sequence.
  ControlTrajectory controls;
  // Predicted states under `controls` from the solve state: T + 1 entries.
  std::vector<StateVector> states;
  // Predicted outputs, one per timestep.
  OutputTrajectory outputs;
  // Weight transform of the final optimization iteration.
  WeightResult weights;
  double solve_time_ms = 0.0;
};

struct MppiSettings {
  int num_samples = 1024;
  int iterations = 1;
  double lambda = 1.0;
  double dt = 0.02;
  int horizon = 100;
  // Update step sizes: empty means 1 everywhere (plain weighted-average
  // update); one entry broadcasts; horizon entries give per-timestep values.
  std::vector<float> step_sizes;
};

/// Shared interface: stateful receding-horizon solvers that keep a warm-start
/// mean between calls.
class Controller {
 public:
  virtual ~Controller() = default;

  const std::string& name() const { return name_; }
  const DynamicsModel& dynamics() const { return *dynamics_; }
  const CostFunction& cost() const { return *cost_; }
  RolloutEngine& engine() { return *engine_; }
  double dt() const { return mean_.dt(); }
  int horizon() const { return mean_.horizon(); }
  const ControlTrajectory& mean() const { return mean_; }
  void set_mean(ControlTrajectory mean);
  void reset_mean();

  virtual ControllerSolution compute_control(const StateVector& x0) = 0;

  /// Advances the warm-start mean by the elapsed time: the elapsed span is
  /// quantized to dt_min, converted to whole control steps (round to
  /// nearest, ties to even), the sequence is shifted left with the last
  /// control repeated, and a shift past the horizon resets the mean to zero.
  virtual void shift_control_sequence(double elapsed_s, double dt_min);

 protected:
  Controller(std::string name, std::shared_ptr<const DynamicsModel> dynamics,
             std::shared_ptr<const CostFunction> cost, GaussianSamplerConfig sampler_config,
             MppiSettings settings, EngineConfig engine_config);

  ControllerSolution finish_solution(const StateVector& x0, WeightResult weights,
                                     double solve_ms) const;
  uint32_t stream_for(int iteration) const;
  void bump_solve_count() { ++solve_count_; }

  std::shared_ptr<const DynamicsModel> dynamics_;
  std::shared_ptr<const CostFunction> cost_;
  GaussianSampler sampler_;
  MppiSettings settings_;
  std::unique_ptr<RolloutEngine> engine_;
  ControlTrajectory mean_;

 private:
  std::string name_;
  uint64_t solve_count_ = 0;
};

/// Sampling-based solver with the exponentially weighted noise average
/// update. A step size below 1 blends the update toward the previous mean;
/// step size 1 applies the weighted average exactly.
class MppiController : public Controller {
 public:
  MppiController(std::shared_ptr<const DynamicsModel> dynamics,
                 std::shared_ptr<const CostFunction> cost, GaussianSamplerConfig sampler_config,
                 MppiSettings settings, EngineConfig engine_config = {},
                 std::string name = "mppi");

  ControllerSolution compute_control(const StateVector& x0) override;
};

struct CemSettings {
  double elite_fraction = 0.125;
};

/// Cross-entropy method: the new mean is the plain average of the elite
/// (lowest-cost) sampled controls, ties broken by lower sample index. The
/// reported weights are 1/k on the k elites and 0 elsewhere; the sampling
/// variance stays fixed. Importance-sampling cost adjustments do not apply
/// to the elite ranking.
class CemController : public Controller {
 public:
  CemController(std::shared_ptr<const DynamicsModel> dynamics,
                std::shared_ptr<const CostFunction> cost, GaussianSamplerConfig sampler_config,
                MppiSettings settings, CemSettings cem, EngineConfig engine_config = {});

  ControllerSolution compute_control(const StateVector& x0) override;

 private:
  CemSettings cem_;
};

struct TubeSolution {
  ControllerSolution nominal;
  ControllerSolution real;
  // Nominal first control plus state feedback toward the nominal state.
  ControlVector applied;
  // Nominal state used for this solve (before advancing).
  StateVector nominal_state;
};

/// Disturbance-rejecting variant: a nominal system evolves only through the
/// model under its own optimal controls, the real system is re-solved from
/// the measured state, and both share one noise batch per iteration. The
/// nominal state is re-seeded from the real state only when their distance
/// exceeds the reset bound (infinite by default).
class TubeMppiController : public Controller {
 public:
  TubeMppiController(std::shared_ptr<const DynamicsModel> dynamics,
                     std::shared_ptr<const CostFunction> cost,
                     GaussianSamplerConfig sampler_config, MppiSettings settings,
                     PidGains feedback_gains,
                     double nominal_reset_bound = std::numeric_limits<double>::infinity(),
                     EngineConfig engine_config = {});

  TubeSolution tube_compute_control(const StateVector& x_real);

  /// Returns the nominal solution; pair with a plant-side PID tracking its
  /// predicted states to recover the applied-control scheme.
  ControllerSolution compute_control(const StateVector& x0) override;

  void shift_control_sequence(double elapsed_s, double dt_min) override;

  const StateVector& nominal_state() const { return nominal_state_; }

 private:
  ControlTrajectory real_mean_;
  StateVector nominal_state_;
  bool nominal_started_ = false;
  PidController pid_;
  PidState pid_state_;
  double reset_bound_;
};

/// Assembles the configured controller with its model, cost, sampler, and
/// engine. Engine options (workers, strategy) come from the caller since
/// they are deployment choices, not scenario content.
std::unique_ptr<Controller> make_controller(const ScenarioConfig& scenario,
                                            EngineConfig engine_config = {});

}  // namespace smpc
