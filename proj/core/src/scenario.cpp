#include "smpc/scenario.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace smpc {
namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, size_t byte) {
  int line = 1;
  const size_t limit = std::min(byte, text.size());
  for (size_t i = 0; i < limit; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

/// Pulls known keys out of a JSON object and rejects anything left over, so
/// typos in config files fail loudly instead of silently using defaults.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError("config: expected an object at '" + path_ + "'");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: wrong type for '" + qualified(key) + "'");
    }
  }

  const json* section(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("config: unknown key '" + qualified(it.key()) + "'");
      }
    }
  }

  std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_sampler(const json& j, SamplerSection& out) {
  ObjectReader r(j, "sampler");
  r.read("std_per_step", out.std_per_step);
  r.read("zero_mean_fraction", out.zero_mean_fraction);
  r.read("include_mean_sample", out.include_mean_sample);
  r.read("importance_sampling", out.importance_sampling);
  r.finish();
}

void read_dynamics(const json& j, DynamicsSection& out) {
  ObjectReader r(j, "dynamics");
  r.read("kind", out.kind);
  r.read("cart_mass", out.cart_mass);
  r.read("pole_mass", out.pole_mass);
  r.read("pole_length", out.pole_length);
  r.read("gravity", out.gravity);
  r.read("wheel_radius", out.wheel_radius);
  r.read("wheel_length", out.wheel_length);
  r.read("v_min", out.v_min);
  r.read("v_max", out.v_max);
  r.read("w_min", out.w_min);
  r.read("w_max", out.w_max);
  r.finish();
}

void read_cost(const json& j, CostSection& out) {
  ObjectReader r(j, "cost");
  r.read("kind", out.kind);
  r.read("road_half_width", out.road_half_width);
  r.read("road_linear_coeff", out.road_linear_coeff);
  r.read("road_quadratic_coeff", out.road_quadratic_coeff);
  r.read("goal_x", out.goal_x);
  r.read("goal_y", out.goal_y);
  r.read("goal_yaw", out.goal_yaw);
  r.read("dist_coeff", out.dist_coeff);
  r.read("yaw_coeff", out.yaw_coeff);
  r.read("obstacle_cost", out.obstacle_cost);
  r.read("costmap_path", out.costmap_path);
  r.read("map_width", out.map_width);
  r.read("map_height", out.map_height);
  r.read("map_resolution", out.map_resolution);
  r.read("map_origin_x", out.map_origin_x);
  r.read("map_origin_y", out.map_origin_y);
  r.read("inner_radius", out.inner_radius);
  r.read("outer_radius", out.outer_radius);
  r.read("crash_cost", out.crash_cost);
  r.read("speed_target", out.speed_target);
  r.read("speed_coeff", out.speed_coeff);
  r.read("angular_momentum_target", out.angular_momentum_target);
  r.read("angular_momentum_coeff", out.angular_momentum_coeff);
  r.read("target", out.target);
  r.read("weights", out.weights);
  r.finish();
}

void read_controller(const json& j, ControllerSection& out) {
  ObjectReader r(j, "controller");
  r.read("kind", out.kind);
  r.read("step_size", out.step_size);
  r.read("step_size_per_step", out.step_size_per_step);
  r.read("elite_fraction", out.elite_fraction);
  r.read("nominal_reset_bound", out.nominal_reset_bound);
  r.finish();
}

void read_feedback(const json& j, FeedbackSection& out) {
  ObjectReader r(j, "feedback");
  r.read("kind", out.kind);
  r.read("kp", out.kp);
  r.read("ki", out.ki);
  r.read("kd", out.kd);
  r.read("integral_limit", out.integral_limit);
  r.finish();
}

void read_plant(const json& j, PlantSection& out) {
  ObjectReader r(j, "plant");
  r.read("replan_rate", out.replan_rate);
  r.read("dt_min", out.dt_min);
  r.read("disturbance_std", out.disturbance_std);
  r.finish();
}

void require(std::vector<std::string>& errors, bool ok, const std::string& message) {
  if (!ok) errors.push_back(message);
}

json gains_to_json(const std::vector<std::vector<double>>& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> errors;
  require(errors, c.dt > 0.0, "dt must be > 0");
  require(errors, c.horizon >= 1, "horizon must be >= 1");
  require(errors, c.num_samples >= 1, "num_samples must be >= 1");
  require(errors, c.iterations >= 1, "iterations must be >= 1");
  require(errors, c.lambda > 0.0, "lambda must be > 0");
  require(errors, !c.control_std.empty(), "control_std must have at least one entry");
  for (size_t i = 0; i < c.control_std.size(); ++i) {
    require(errors, c.control_std[i] > 0.0,
            "control_std[" + std::to_string(i) + "] must be > 0");
  }

  require(errors,
          c.sampler.zero_mean_fraction >= 0.0 && c.sampler.zero_mean_fraction <= 1.0,
          "sampler.zero_mean_fraction must be in [0, 1]");
  for (size_t t = 0; t < c.sampler.std_per_step.size(); ++t) {
    for (size_t ch = 0; ch < c.sampler.std_per_step[t].size(); ++ch) {
      require(errors, c.sampler.std_per_step[t][ch] > 0.0,
              "sampler.std_per_step[" + std::to_string(t) + "][" + std::to_string(ch) +
                  "] must be > 0");
    }
  }

  const std::set<std::string> dynamics_kinds = {"unicycle", "cartpole", "diff_drive",
                                               "double_integrator"};
  require(errors, dynamics_kinds.count(c.dynamics.kind) > 0,
          "dynamics.kind '" + c.dynamics.kind + "' is not recognized");
  require(errors, c.dynamics.cart_mass > 0.0, "dynamics.cart_mass must be > 0");
  require(errors, c.dynamics.pole_mass > 0.0, "dynamics.pole_mass must be > 0");
  require(errors, c.dynamics.pole_length > 0.0, "dynamics.pole_length must be > 0");
  require(errors, c.dynamics.wheel_radius > 0.0, "dynamics.wheel_radius must be > 0");
  require(errors, c.dynamics.wheel_length > 0.0, "dynamics.wheel_length must be > 0");
  require(errors, c.dynamics.v_min < c.dynamics.v_max, "dynamics.v_min must be < v_max");
  require(errors, c.dynamics.w_min < c.dynamics.w_max, "dynamics.w_min must be < w_max");

  const std::set<std::string> cost_kinds = {"road", "diff_drive_nav", "circle_track",
                                            "quadratic"};
  require(errors, cost_kinds.count(c.cost.kind) > 0,
          "cost.kind '" + c.cost.kind + "' is not recognized");
  require(errors, c.cost.road_half_width > 0.0, "cost.road_half_width must be > 0");
  require(errors, c.cost.map_resolution > 0.0, "cost.map_resolution must be > 0");
  require(errors, c.cost.map_width > 0.0, "cost.map_width must be > 0");
  require(errors, c.cost.map_height > 0.0, "cost.map_height must be > 0");
  require(errors, c.cost.inner_radius > 0.0, "cost.inner_radius must be > 0");
  require(errors, c.cost.inner_radius < c.cost.outer_radius,
          "cost.inner_radius must be < outer_radius");
  if (c.cost.kind == "quadratic") {
    require(errors, !c.cost.weights.empty(), "cost.weights must be set for quadratic cost");
    require(errors, c.cost.target.size() == c.cost.weights.size(),
            "cost.target and cost.weights must have equal length");
  }

  const std::set<std::string> controller_kinds = {"mppi", "dmd", "cem", "tube"};
  require(errors, controller_kinds.count(c.controller.kind) > 0,
          "controller.kind '" + c.controller.kind + "' is not recognized");
  require(errors, c.controller.step_size > 0.0 && c.controller.step_size <= 1.0,
          "controller.step_size must be in (0, 1]");
  for (size_t t = 0; t < c.controller.step_size_per_step.size(); ++t) {
    require(errors,
            c.controller.step_size_per_step[t] > 0.0 &&
                c.controller.step_size_per_step[t] <= 1.0,
            "controller.step_size_per_step[" + std::to_string(t) + "] must be in (0, 1]");
  }
  require(errors, c.controller.elite_fraction > 0.0 && c.controller.elite_fraction <= 1.0,
          "controller.elite_fraction must be in (0, 1]");
  require(errors, c.controller.nominal_reset_bound > 0.0,
          "controller.nominal_reset_bound must be > 0");

  require(errors, c.feedback.kind == "none" || c.feedback.kind == "pid",
          "feedback.kind '" + c.feedback.kind + "' is not recognized");
  for (const auto* gains : {&c.feedback.kp, &c.feedback.ki, &c.feedback.kd}) {
    for (size_t r = 1; r < gains->size(); ++r) {
      require(errors, (*gains)[r].size() == (*gains)[0].size(),
              "feedback gain rows must all have the same length");
    }
  }
  require(errors, c.feedback.integral_limit > 0.0, "feedback.integral_limit must be > 0");

  require(errors, c.plant.replan_rate > 0.0, "plant.replan_rate must be > 0");
  require(errors, c.plant.dt_min > 0.0, "plant.dt_min must be > 0");
  require(errors, c.plant.disturbance_std >= 0.0, "plant.disturbance_std must be >= 0");
  return errors;
}

ScenarioConfig parse_scenario(const std::string& text) {
  bool blank = true;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) {
      blank = false;
      break;
    }
  }
  ScenarioConfig config;
  if (blank) return config;

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at line " + std::to_string(line_of_byte(text, e.byte)) +
                      ": " + e.what());
  }

  ObjectReader r(j, "");
  r.read("dt", config.dt);
  r.read("horizon", config.horizon);
  r.read("num_samples", config.num_samples);
  r.read("iterations", config.iterations);
  r.read("lambda", config.lambda);
  r.read("control_std", config.control_std);
  r.read("rng_seed", config.rng_seed);
  if (const json* s = r.section("sampler")) read_sampler(*s, config.sampler);
  if (const json* s = r.section("dynamics")) read_dynamics(*s, config.dynamics);
  if (const json* s = r.section("cost")) read_cost(*s, config.cost);
  if (const json* s = r.section("controller")) read_controller(*s, config.controller);
  if (const json* s = r.section("feedback")) read_feedback(*s, config.feedback);
  if (const json* s = r.section("plant")) read_plant(*s, config.plant);
  r.read("initial_state", config.initial_state);
  r.finish();

  const std::vector<std::string> errors = validate(config);
  if (!errors.empty()) {
    std::string message = "config invalid:";
    for (const auto& e : errors) message += "\n  " + e;
    throw ConfigError(message);
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["num_samples"] = c.num_samples;
  j["iterations"] = c.iterations;
  j["lambda"] = c.lambda;
  j["control_std"] = c.control_std;
  j["rng_seed"] = c.rng_seed;

  json& sampler = j["sampler"];
  sampler["std_per_step"] = c.sampler.std_per_step;
  sampler["zero_mean_fraction"] = c.sampler.zero_mean_fraction;
  sampler["include_mean_sample"] = c.sampler.include_mean_sample;
  sampler["importance_sampling"] = c.sampler.importance_sampling;

  json& dynamics = j["dynamics"];
  dynamics["kind"] = c.dynamics.kind;
  dynamics["cart_mass"] = c.dynamics.cart_mass;
  dynamics["pole_mass"] = c.dynamics.pole_mass;
  dynamics["pole_length"] = c.dynamics.pole_length;
  dynamics["gravity"] = c.dynamics.gravity;
  dynamics["wheel_radius"] = c.dynamics.wheel_radius;
  dynamics["wheel_length"] = c.dynamics.wheel_length;
  dynamics["v_min"] = c.dynamics.v_min;
  dynamics["v_max"] = c.dynamics.v_max;
  dynamics["w_min"] = c.dynamics.w_min;
  dynamics["w_max"] = c.dynamics.w_max;

  json& cost = j["cost"];
  cost["kind"] = c.cost.kind;
  cost["road_half_width"] = c.cost.road_half_width;
  cost["road_linear_coeff"] = c.cost.road_linear_coeff;
  cost["road_quadratic_coeff"] = c.cost.road_quadratic_coeff;
  cost["goal_x"] = c.cost.goal_x;
  cost["goal_y"] = c.cost.goal_y;
  cost["goal_yaw"] = c.cost.goal_yaw;
  cost["dist_coeff"] = c.cost.dist_coeff;
  cost["yaw_coeff"] = c.cost.yaw_coeff;
  cost["obstacle_cost"] = c.cost.obstacle_cost;
  cost["costmap_path"] = c.cost.costmap_path;
  cost["map_width"] = c.cost.map_width;
  cost["map_height"] = c.cost.map_height;
  cost["map_resolution"] = c.cost.map_resolution;
  cost["map_origin_x"] = c.cost.map_origin_x;
  cost["map_origin_y"] = c.cost.map_origin_y;
  cost["inner_radius"] = c.cost.inner_radius;
  cost["outer_radius"] = c.cost.outer_radius;
  cost["crash_cost"] = c.cost.crash_cost;
  cost["speed_target"] = c.cost.speed_target;
  cost["speed_coeff"] = c.cost.speed_coeff;
  cost["angular_momentum_target"] = c.cost.angular_momentum_target;
  cost["angular_momentum_coeff"] = c.cost.angular_momentum_coeff;
  cost["target"] = c.cost.target;
  cost["weights"] = c.cost.weights;

  json& controller = j["controller"];
  controller["kind"] = c.controller.kind;
  controller["step_size"] = c.controller.step_size;
  controller["step_size_per_step"] = c.controller.step_size_per_step;
  controller["elite_fraction"] = c.controller.elite_fraction;
  // JSON has no infinity literal; an absent key means "never reset".
  if (std::isfinite(c.controller.nominal_reset_bound)) {
    controller["nominal_reset_bound"] = c.controller.nominal_reset_bound;
  }

  json& feedback = j["feedback"];
  feedback["kind"] = c.feedback.kind;
  feedback["kp"] = gains_to_json(c.feedback.kp);
  feedback["ki"] = gains_to_json(c.feedback.ki);
  feedback["kd"] = gains_to_json(c.feedback.kd);
  if (std::isfinite(c.feedback.integral_limit)) {
    feedback["integral_limit"] = c.feedback.integral_limit;
  }

  json& plant = j["plant"];
  plant["replan_rate"] = c.plant.replan_rate;
  plant["dt_min"] = c.plant.dt_min;
  plant["disturbance_std"] = c.plant.disturbance_std;

  j["initial_state"] = c.initial_state;
  return j.dump(2) + "\n";
}

void save_scenario(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << scenario_to_json(config);
}

}  // namespace smpc
