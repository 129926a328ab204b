#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "smpc/types.hpp"

namespace smpc {

/// Extra sampling-distribution knobs beyond the per-channel std deviations.
struct SamplerSection {
  // Optional per-timestep std deviations, horizon x n_u. Empty means the
  // per-channel values apply at every timestep.
  std::vector<std::vector<double>> std_per_step;
  double zero_mean_fraction = 0.0;
  bool include_mean_sample = true;
  bool importance_sampling = true;

  bool operator==(const SamplerSection&) const = default;
};

struct DynamicsSection {
  std::string kind = "diff_drive";

  // cartpole
  double cart_mass = 1.0;
  double pole_mass = 1.0;
  double pole_length = 1.0;
  double gravity = 9.81;

  // diff_drive
  double wheel_radius = 1.0;
  double wheel_length = 1.0;
  double v_min = -0.35;
  double v_max = 0.5;
  double w_min = -0.5;
  double w_max = 0.5;

  bool operator==(const DynamicsSection&) const = default;
};

struct CostSection {
  std::string kind = "diff_drive_nav";

  // road
  double road_half_width = 1.0;
  double road_linear_coeff = 1.0;
  double road_quadratic_coeff = 10.0;

  // diff_drive_nav
  double goal_x = 2.0;
  double goal_y = 2.0;
  double goal_yaw = 0.0;
  double dist_coeff = 5.0;
  double yaw_coeff = 5.0;
  double obstacle_cost = 20.0;
  std::string costmap_path;
  double map_width = 11.0;
  double map_height = 11.0;
  double map_resolution = 0.1;
  double map_origin_x = -5.5;
  double map_origin_y = -5.5;

  // circle_track
  double inner_radius = 1.875;
  double outer_radius = 2.125;
  double crash_cost = 1000.0;
  double speed_target = 2.0;
  double speed_coeff = 2.0;
  double angular_momentum_target = 4.0;
  double angular_momentum_coeff = 2.0;

  // quadratic
  std::vector<double> target;
  std::vector<double> weights;

  bool operator==(const CostSection&) const = default;
};

struct ControllerSection {
  std::string kind = "mppi";  // mppi | dmd | cem | tube
  double step_size = 1.0;
  // Optional per-timestep step sizes; overrides step_size when non-empty.
  std::vector<double> step_size_per_step;
  double elite_fraction = 0.125;
  // Distance between real and nominal state that forces a nominal reset.
  // Infinite by default (never reset).
  double nominal_reset_bound = std::numeric_limits<double>::infinity();

  bool operator==(const ControllerSection&) const = default;
};

struct FeedbackSection {
  std::string kind = "none";  // none | pid
  // Row-major n_u x n_x gain matrices.
  std::vector<std::vector<double>> kp;
  std::vector<std::vector<double>> ki;
  std::vector<std::vector<double>> kd;
  double integral_limit = std::numeric_limits<double>::infinity();

  bool operator==(const FeedbackSection&) const = default;
};

struct PlantSection {
  double replan_rate = 50.0;
  // Quantum for control-sequence shifting between replans.
  double dt_min = 0.02;
  double disturbance_std = 0.0;

  bool operator==(const PlantSection&) const = default;
};

/// Complete description of a control problem: model, cost, controller,
/// sampling distribution, and plant loop parameters.
struct ScenarioConfig {
  double dt = 0.02;
  int horizon = 100;
  int num_samples = 1024;
  int iterations = 1;
  double lambda = 1.0;
  // Per-channel control std deviations; a single entry broadcasts to all
  // channels at assembly time.
  std::vector<double> control_std = {0.2};
  uint64_t rng_seed = 0;

  SamplerSection sampler;
  DynamicsSection dynamics;
  CostSection cost;
  ControllerSection controller;
  FeedbackSection feedback;
  PlantSection plant;

  // Start state by channel name (e.g. {"X": 2.0}); unnamed channels are 0.
  std::map<std::string, double> initial_state;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Returns every invariant violation in the config, one message per field.
/// An empty result means the config is valid.
std::vector<std::string> validate(const ScenarioConfig& config);

/// Parses a scenario from JSON text. A blank document yields the defaults.
/// Throws ConfigError naming the offending key (and line, for syntax errors);
/// unknown keys are rejected. The parsed config is validated.
ScenarioConfig parse_scenario(const std::string& text);

/// Reads and parses a scenario file. An empty file yields the defaults.
ScenarioConfig load_scenario(const std::string& path);

std::string scenario_to_json(const ScenarioConfig& config);
void save_scenario(const ScenarioConfig& config, const std::string& path);

}  // namespace smpc
