#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smpc/controllers.hpp"
#include "smpc/dynamics.hpp"
#include "smpc/feedback.hpp"
#include "smpc/rng.hpp"
#include "smpc/types.hpp"

namespace smpc {

struct PlantConfig {
  // Re-solves per simulated second.
  double replan_rate = 50.0;
  // Quantum used when shifting the warm-start sequence between solves.
  double dt_min = 0.02;
};

/// Forward-simulated system: the model stepped under applied controls, with
/// an optional seeded Gaussian disturbance added to the state each step.
class SimulatedSystem {
 public:
  SimulatedSystem(std::shared_ptr<const DynamicsModel> dynamics, StateVector x0,
                  double disturbance_std = 0.0, uint64_t seed = 0);

  const DynamicsModel& dynamics() const { return *dynamics_; }
  const StateVector& state() const { return x_; }
  void reset(StateVector x0);
  void step(const ControlVector& u, double dt);

 private:
  std::shared_ptr<const DynamicsModel> dynamics_;
  StateVector x_;
  double disturbance_std_;
  NormalStream normals_;
  uint32_t step_count_ = 0;
};

struct ControlLogRow {
  double t = 0.0;
  StateVector x;
  ControlVector u;
  double running_cost = 0.0;
};

struct LoopResult {
  std::vector<ControlLogRow> rows;
  double accumulated_cost = 0.0;
  int solve_count = 0;
  double mean_solve_ms = 0.0;
};

/// Bridges a controller and an executing system: holds the latest state
/// snapshot and solution behind a mutex, re-solves on demand, and serves
/// zero-order-hold controls for any query time.
class Plant {
 public:
  Plant(PlantConfig config, std::shared_ptr<Controller> controller,
        std::optional<PidGains> tracking_feedback = std::nullopt);

  const PlantConfig& config() const { return config_; }
  Controller& controller() { return *controller_; }

  /// Called with the fresh solution and the snapshot time after each solve.
  void set_publish_hook(std::function<void(const ControllerSolution&, double)> hook);

  /// Records the measured state at time t. Time must not run backwards.
  void update_state(const StateVector& x, double t);

  /// Shifts the warm start by the time elapsed since the previous solve and
  /// re-solves from the latest snapshot. Requires a snapshot.
  ControllerSolution run_control_iteration();

  /// Zero-order-hold control for time t from the latest solution; the flag
  /// reports staleness (t outside the solution's horizon). Requires a
  /// solution.
  std::pair<ControlVector, bool> control_for_time(double t) const;

  /// Predicted state the solution associates with time t (for tracking
  /// feedback).
  StateVector reference_state_for_time(double t) const;

  bool has_solution() const;

  /// Simulates duration_s of closed-loop control at the controller's dt,
  /// re-solving at the configured replan rate and logging every applied
  /// step. The per-row running cost comes from the controller's cost
  /// function evaluated at the pre-step state.
  LoopResult run_control_loop(SimulatedSystem& sim, double duration_s);

 private:
  PlantConfig config_;
  std::shared_ptr<Controller> controller_;
  std::function<void(const ControllerSolution&, double)> publish_;

  mutable std::mutex mutex_;
  std::optional<StateVector> snapshot_x_;
  double snapshot_t_ = 0.0;
  std::optional<ControllerSolution> solution_;
  double solution_t_ = 0.0;

  std::optional<PidController> feedback_;
  PidState feedback_state_;
};

/// Writes rows as CSV with header t,x0..x{n_x-1},u0..u{n_u-1},running_cost.
void write_trajectory_log(const std::string& path, const std::vector<ControlLogRow>& rows);

/// Builds the plant (and optional tracking PID) described by the scenario.
Plant make_plant(const ScenarioConfig& scenario, std::shared_ptr<Controller> controller);

/// Builds the simulated system described by the scenario: the scenario's
/// dynamics started from its named initial state, with the configured
/// disturbance level and a seed derived from the scenario seed.
SimulatedSystem make_simulated_system(const ScenarioConfig& scenario);

}  // namespace smpc
