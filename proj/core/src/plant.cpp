#include "smpc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace smpc {

SimulatedSystem::SimulatedSystem(std::shared_ptr<const DynamicsModel> dynamics, StateVector x0,
                                 double disturbance_std, uint64_t seed)
    : dynamics_(std::move(dynamics)),
      x_(std::move(x0)),
      disturbance_std_(disturbance_std),
      normals_(seed) {
  if (!dynamics_) throw Error("simulated system: dynamics model is required");
  if (x_.dim() != dynamics_->dims().n_x) {
    throw Error("simulated system: initial state dimension mismatch");
  }
  if (disturbance_std_ < 0.0) throw Error("simulated system: disturbance_std must be >= 0");
}

void SimulatedSystem::reset(StateVector x0) {
  if (x0.dim() != dynamics_->dims().n_x) {
    throw Error("simulated system: reset state dimension mismatch");
  }
  x_ = std::move(x0);
  step_count_ = 0;
}

void SimulatedSystem::step(const ControlVector& u, double dt) {
  auto [x_next, y] = dynamics_->step(x_, u, static_cast<float>(dt));
  if (disturbance_std_ > 0.0) {
    const int n_x = dynamics_->dims().n_x;
    const float scale = static_cast<float>(disturbance_std_ * std::sqrt(dt));
    Vec x = x_next.vec();
    for (int ch = 0; ch < n_x; ++ch) {
      const std::array<float, 4> z =
          normals_.quad(step_count_, static_cast<uint32_t>(ch / 4), 0);
      x[ch] += scale * z[static_cast<size_t>(ch % 4)];
    }
    for (int ch : dynamics_->angular_state_channels()) x[ch] = wrap_angle(x[ch]);
    x_next = StateVector(std::move(x));
  }
  x_ = std::move(x_next);
  ++step_count_;
}

Plant::Plant(PlantConfig config, std::shared_ptr<Controller> controller,
             std::optional<PidGains> tracking_feedback)
    : config_(config), controller_(std::move(controller)) {
  if (!controller_) throw Error("plant: controller is required");
  if (!(config_.replan_rate > 0.0)) throw Error("plant: replan_rate must be > 0");
  if (!(config_.dt_min > 0.0)) throw Error("plant: dt_min must be > 0");
  if (tracking_feedback.has_value()) {
    feedback_.emplace(std::move(*tracking_feedback));
    feedback_state_ = feedback_->make_state();
  }
}

void Plant::set_publish_hook(std::function<void(const ControllerSolution&, double)> hook) {
  std::lock_guard<std::mutex> lock(mutex_);
  publish_ = std::move(hook);
}

void Plant::update_state(const StateVector& x, double t) {
  if (x.dim() != controller_->dynamics().dims().n_x) {
    throw Error("plant: snapshot state dimension mismatch");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  if (snapshot_x_.has_value() && t < snapshot_t_) {
    throw Error("plant: snapshot time went backwards");
  }
  snapshot_x_ = x;
  snapshot_t_ = t;
}

ControllerSolution Plant::run_control_iteration() {
  StateVector x;
  double t = 0.0;
  bool warm = false;
  double elapsed = 0.0;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!snapshot_x_.has_value()) {
      throw Error("plant: no state snapshot, call update_state first");
    }
    x = *snapshot_x_;
    t = snapshot_t_;
    warm = solution_.has_value();
    if (warm) elapsed = t - solution_t_;
  }

  if (warm) controller_->shift_control_sequence(elapsed, config_.dt_min);
  ControllerSolution solution = controller_->compute_control(x);

  std::function<void(const ControllerSolution&, double)> hook;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    solution_ = solution;
    solution_t_ = t;
    hook = publish_;
  }
  if (hook) hook(solution, t);
  return solution;
}

std::pair<ControlVector, bool> Plant::control_for_time(double t) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!solution_.has_value()) throw Error("plant: no solution available");
  const ControlTrajectory& controls = solution_->controls;
  const int T = controls.horizon();
  const int raw = static_cast<int>(std::floor((t - solution_t_) / controls.dt()));
  const bool stale = raw < 0 || raw >= T;
  const int idx = std::clamp(raw, 0, T - 1);
  return {controls.at(idx), stale};
}

StateVector Plant::reference_state_for_time(double t) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!solution_.has_value()) throw Error("plant: no solution available");
  const int T = solution_->controls.horizon();
  const int raw = static_cast<int>(std::floor((t - solution_t_) / solution_->controls.dt()));
  const int idx = std::clamp(raw, 0, T);
  return solution_->states.at(static_cast<size_t>(idx));
}

bool Plant::has_solution() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return solution_.has_value();
}

LoopResult Plant::run_control_loop(SimulatedSystem& sim, double duration_s) {
  if (!(duration_s > 0.0)) throw Error("plant: loop duration must be > 0");
  const double dt = controller_->dt();
  const long long steps = std::llround(duration_s / dt);
  const double replan_interval = 1.0 / config_.replan_rate;
  const DynamicsModel& model = controller_->dynamics();
  const CostFunction& cost = controller_->cost();

  LoopResult out;
  double next_replan_t = 0.0;
  double total_ms = 0.0;
  bool solved_once = false;
  for (long long step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    if (!solved_once || t >= next_replan_t - 1e-9) {
      update_state(sim.state(), t);
      const ControllerSolution solution = run_control_iteration();
      total_ms += solution.solve_time_ms;
      ++out.solve_count;
      solved_once = true;
      while (next_replan_t <= t + 1e-9) next_replan_t += replan_interval;
    }

    auto [u, stale] = control_for_time(t);
    (void)stale;
    if (feedback_.has_value()) {
      const ControlVector correction =
          feedback_->feedback(sim.state(), reference_state_for_time(t), feedback_state_);
      Vec blended = u.vec() + correction.vec();
      u = ControlVector(std::move(blended));
    }

    const StateVector& x = sim.state();
    float u_clamped[kMaxDim];
    model.clamp_control(u.data(), u_clamped);
    Vec uc(u.dim());
    for (Eigen::Index c = 0; c < uc.size(); ++c) uc[c] = u_clamped[c];
    const ControlVector u_applied(std::move(uc));

    const OutputVector y = model.observation(x, u_applied);
    const double c = cost.running_cost(y, u_applied, static_cast<int>(step));

    out.rows.push_back(ControlLogRow{t, x, u_applied, c});
    out.accumulated_cost += c;
    sim.step(u_applied, dt);
  }
  out.mean_solve_ms = out.solve_count > 0 ? total_ms / out.solve_count : 0.0;
  return out;
}

void write_trajectory_log(const std::string& path, const std::vector<ControlLogRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  if (rows.empty()) throw Error("trajectory log needs at least one row");

  const Eigen::Index n_x = rows.front().x.dim();
  const Eigen::Index n_u = rows.front().u.dim();
  out << "t";
  for (Eigen::Index i = 0; i < n_x; ++i) out << ",x" << i;
  for (Eigen::Index i = 0; i < n_u; ++i) out << ",u" << i;
  out << ",running_cost\n";

  char buf[64];
  for (const ControlLogRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g", row.t);
    out << buf;
    for (Eigen::Index i = 0; i < n_x; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.9g", static_cast<double>(row.x[i]));
      out << buf;
    }
    for (Eigen::Index i = 0; i < n_u; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.9g", static_cast<double>(row.u[i]));
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.9g\n", row.running_cost);
    out << buf;
  }
}

Plant make_plant(const ScenarioConfig& scenario, std::shared_ptr<Controller> controller) {
  PlantConfig config;
  config.replan_rate = scenario.plant.replan_rate;
  config.dt_min = scenario.plant.dt_min;
  std::optional<PidGains> feedback;
  if (scenario.feedback.kind == "pid") {
    const ModelDims& dims = controller->dynamics().dims();
    feedback = make_pid_gains(scenario.feedback, dims.n_u, dims.n_x,
                              static_cast<float>(scenario.dt));
  }
  return Plant(config, std::move(controller), std::move(feedback));
}

SimulatedSystem make_simulated_system(const ScenarioConfig& scenario) {
  std::shared_ptr<const DynamicsModel> dynamics = make_dynamics(scenario.dynamics);
  StateVector x0 = dynamics->state_from_named_values(scenario.initial_state);
  // Offset keeps the disturbance stream distinct from the sampler streams.
  return SimulatedSystem(std::move(dynamics), std::move(x0), scenario.plant.disturbance_std,
                         scenario.rng_seed ^ 0x9E3779B97F4A7C15ull);
}

}  // namespace smpc
