#include "smpc/controllers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace smpc {
namespace {

// Streams per solve; bounds the iteration count so every (solve, iteration)
// pair maps to a distinct noise stream.
constexpr int kStreamsPerSolve = 256;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Controller::Controller(std::string name, std::shared_ptr<const DynamicsModel> dynamics,
                       std::shared_ptr<const CostFunction> cost,
                       GaussianSamplerConfig sampler_config, MppiSettings settings,
                       EngineConfig engine_config)
    : dynamics_(std::move(dynamics)),
      cost_(std::move(cost)),
      sampler_(std::move(sampler_config), dynamics_ ? dynamics_->dims().n_u : 0),
      settings_(std::move(settings)),
      engine_(std::make_unique<RolloutEngine>(std::move(engine_config))),
      name_(std::move(name)) {
  if (!dynamics_ || !cost_) throw Error(name_ + ": dynamics and cost are required");
  if (settings_.num_samples < 1) throw Error(name_ + ": num_samples must be >= 1");
  if (settings_.iterations < 1 || settings_.iterations > kStreamsPerSolve) {
    throw Error(name_ + ": iterations must be in [1, " + std::to_string(kStreamsPerSolve) + "]");
  }
  if (!(settings_.lambda > 0.0)) throw Error(name_ + ": lambda must be > 0");
  if (!(settings_.dt > 0.0)) throw Error(name_ + ": dt must be > 0");
  if (settings_.horizon < 1) throw Error(name_ + ": horizon must be >= 1");
  if (!(settings_.step_sizes.empty() || settings_.step_sizes.size() == 1 ||
        settings_.step_sizes.size() == static_cast<size_t>(settings_.horizon))) {
    throw Error(name_ + ": step_sizes must be empty, scalar, or one per timestep");
  }
  for (float g : settings_.step_sizes) {
    if (!(g > 0.0f && g <= 1.0f)) throw Error(name_ + ": step sizes must be in (0, 1]");
  }
  mean_ = ControlTrajectory::zeros(settings_.horizon, settings_.dt, dynamics_->dims().n_u);
}

void Controller::set_mean(ControlTrajectory mean) {
  if (mean.horizon() != settings_.horizon ||
      mean.control_dim() != dynamics_->dims().n_u || mean.dt() != settings_.dt) {
    throw Error(name_ + ": set_mean trajectory shape mismatch");
  }
  mean_ = std::move(mean);
}

void Controller::reset_mean() {
  mean_ = ControlTrajectory::zeros(settings_.horizon, settings_.dt, dynamics_->dims().n_u);
}

uint32_t Controller::stream_for(int iteration) const {
  return static_cast<uint32_t>(solve_count_ * kStreamsPerSolve +
                               static_cast<uint64_t>(iteration));
}

void Controller::shift_control_sequence(double elapsed_s, double dt_min) {
  if (!(dt_min > 0.0)) throw Error(name_ + ": dt_min must be > 0");
  if (elapsed_s <= 0.0) return;
  const double quantized = static_cast<double>(std::llrint(elapsed_s / dt_min)) * dt_min;
  const long long steps = std::llrint(quantized / mean_.dt());
  if (steps <= 0) return;
  const int T = mean_.horizon();
  if (steps >= T) {
    reset_mean();
    return;
  }
  std::vector<ControlVector> shifted;
  shifted.reserve(static_cast<size_t>(T));
  for (int t = static_cast<int>(steps); t < T; ++t) shifted.push_back(mean_.at(t));
  while (static_cast<int>(shifted.size()) < T) shifted.push_back(mean_.at(T - 1));
  mean_ = ControlTrajectory(mean_.dt(), std::move(shifted));
}

ControllerSolution Controller::finish_solution(const StateVector& x0, WeightResult weights,
                                               double solve_ms) const {
  ControllerSolution solution;
  solution.controls = mean_;
  solution.weights = std::move(weights);
  solution.solve_time_ms = solve_ms;
  solution.states.reserve(static_cast<size_t>(mean_.horizon()) + 1);
  solution.outputs.outputs.reserve(static_cast<size_t>(mean_.horizon()));
  solution.states.push_back(x0);
  StateVector x = x0;
  const float dt = static_cast<float>(mean_.dt());
  for (int t = 0; t < mean_.horizon(); ++t) {
    auto [x_next, y] = dynamics_->step(x, mean_.at(t), dt);
    solution.states.push_back(x_next);
    solution.outputs.outputs.push_back(std::move(y));
    x = std::move(x_next);
  }
  return solution;
}

MppiController::MppiController(std::shared_ptr<const DynamicsModel> dynamics,
                               std::shared_ptr<const CostFunction> cost,
                               GaussianSamplerConfig sampler_config, MppiSettings settings,
                               EngineConfig engine_config, std::string name)
    : Controller(std::move(name), std::move(dynamics), std::move(cost),
                 std::move(sampler_config), std::move(settings), std::move(engine_config)) {}

ControllerSolution MppiController::compute_control(const StateVector& x0) {
  const double t0 = now_ms();
  WeightResult weights;
  for (int iter = 0; iter < settings_.iterations; ++iter) {
    const NoiseBatch batch = sampler_.generate_samples(mean_, settings_.num_samples,
                                                       stream_for(iter), &engine_->pool());
    RolloutRequest request;
    request.dynamics = dynamics_.get();
    request.cost = cost_.get();
    request.initial_states = {x0};
    request.means = {mean_};
    request.noise = &batch;
    if (sampler_.config().importance_sampling) {
      request.cost_adjustments = {
          sampler_.importance_weight_adjustment(batch, mean_, settings_.lambda)};
    }
    const RolloutResult result = engine_->rollout(request);
    weights = RolloutEngine::compute_weights(result.costs[0], settings_.lambda);
    mean_ = RolloutEngine::weighted_update(mean_, batch, weights, settings_.step_sizes);
  }
  bump_solve_count();
  return finish_solution(x0, std::move(weights), now_ms() - t0);
}

CemController::CemController(std::shared_ptr<const DynamicsModel> dynamics,
                             std::shared_ptr<const CostFunction> cost,
                             GaussianSamplerConfig sampler_config, MppiSettings settings,
                             CemSettings cem, EngineConfig engine_config)
    : Controller("cem", std::move(dynamics), std::move(cost), std::move(sampler_config),
                 std::move(settings), std::move(engine_config)),
      cem_(cem) {
  if (!(cem_.elite_fraction > 0.0 && cem_.elite_fraction <= 1.0)) {
    throw Error("cem: elite_fraction must be in (0, 1]");
  }
}

ControllerSolution CemController::compute_control(const StateVector& x0) {
  const double t0 = now_ms();
  const int M = settings_.num_samples;
  WeightResult weights;
  for (int iter = 0; iter < settings_.iterations; ++iter) {
    const NoiseBatch batch =
        sampler_.generate_samples(mean_, M, stream_for(iter), &engine_->pool());
    RolloutRequest request;
    request.dynamics = dynamics_.get();
    request.cost = cost_.get();
    request.initial_states = {x0};
    request.means = {mean_};
    request.noise = &batch;
    const RolloutResult result = engine_->rollout(request);
    const std::vector<double>& costs = result.costs[0];

    const int k = std::max(1, static_cast<int>(std::ceil(cem_.elite_fraction * M)));
    std::vector<int> order(static_cast<size_t>(M));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
      if (costs[static_cast<size_t>(a)] != costs[static_cast<size_t>(b)]) {
        return costs[static_cast<size_t>(a)] < costs[static_cast<size_t>(b)];
      }
      return a < b;
    });

    // New mean = elite average of sampled controls = mean + avg elite noise.
    const int T = batch.horizon;
    const int n_u = batch.control_dim;
    std::vector<double> acc(static_cast<size_t>(T) * n_u, 0.0);
    for (int i = 0; i < k; ++i) {
      const float* row = &batch.eps[static_cast<size_t>(order[static_cast<size_t>(i)]) * T * n_u];
      for (int j = 0; j < T * n_u; ++j) acc[static_cast<size_t>(j)] += row[j];
    }
    std::vector<ControlVector> controls;
    controls.reserve(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) {
      Vec u(n_u);
      for (int c = 0; c < n_u; ++c) {
        u[c] = static_cast<float>(mean_.at(t)[c] + acc[static_cast<size_t>(t) * n_u + c] / k);
      }
      controls.emplace_back(std::move(u));
    }
    mean_ = ControlTrajectory(mean_.dt(), std::move(controls));

    weights.baseline = costs[static_cast<size_t>(order[0])];
    weights.normalizer = static_cast<double>(k);
    weights.weights.assign(static_cast<size_t>(M), 0.0);
    for (int i = 0; i < k; ++i) {
      weights.weights[static_cast<size_t>(order[static_cast<size_t>(i)])] = 1.0 / k;
    }
  }
  bump_solve_count();
  return finish_solution(x0, std::move(weights), now_ms() - t0);
}

TubeMppiController::TubeMppiController(std::shared_ptr<const DynamicsModel> dynamics,
                                       std::shared_ptr<const CostFunction> cost,
                                       GaussianSamplerConfig sampler_config,
                                       MppiSettings settings, PidGains feedback_gains,
                                       double nominal_reset_bound, EngineConfig engine_config)
    : Controller("tube", std::move(dynamics), std::move(cost), std::move(sampler_config),
                 std::move(settings), std::move(engine_config)),
      pid_(std::move(feedback_gains)),
      reset_bound_(nominal_reset_bound) {
  if (!(reset_bound_ > 0.0)) throw Error("tube: nominal_reset_bound must be > 0");
  real_mean_ = mean_;
  pid_state_ = pid_.make_state();
}

TubeSolution TubeMppiController::tube_compute_control(const StateVector& x_real) {
  const double t0 = now_ms();
  if (!nominal_started_) {
    nominal_state_ = x_real;
    nominal_started_ = true;
  } else if (std::isfinite(reset_bound_)) {
    const double distance = (x_real.vec() - nominal_state_.vec()).norm();
    if (distance > reset_bound_) nominal_state_ = x_real;
  }

  WeightResult weights_nominal;
  WeightResult weights_real;
  for (int iter = 0; iter < settings_.iterations; ++iter) {
    // One noise batch serves both systems; it is drawn about the nominal
    // mean so the nominal side never depends on the measured state.
    const NoiseBatch batch = sampler_.generate_samples(mean_, settings_.num_samples,
                                                       stream_for(iter), &engine_->pool());
    RolloutRequest request;
    request.dynamics = dynamics_.get();
    request.cost = cost_.get();
    request.initial_states = {nominal_state_, x_real};
    request.means = {mean_, real_mean_};
    request.noise = &batch;
    if (sampler_.config().importance_sampling) {
      request.cost_adjustments = {
          sampler_.importance_weight_adjustment(batch, mean_, settings_.lambda),
          sampler_.importance_weight_adjustment(batch, real_mean_, settings_.lambda)};
    }
    const RolloutResult result = engine_->rollout(request);
    weights_nominal = RolloutEngine::compute_weights(result.costs[0], settings_.lambda);
    weights_real = RolloutEngine::compute_weights(result.costs[1], settings_.lambda);
    mean_ = RolloutEngine::weighted_update(mean_, batch, weights_nominal, settings_.step_sizes);
    real_mean_ =
        RolloutEngine::weighted_update(real_mean_, batch, weights_real, settings_.step_sizes);
  }
  bump_solve_count();
  const double elapsed = now_ms() - t0;

  TubeSolution solution;
  solution.nominal_state = nominal_state_;
  solution.nominal = finish_solution(nominal_state_, std::move(weights_nominal), elapsed);

  {
    // Real-system solution, built around the real mean.
    ControlTrajectory nominal_mean = mean_;
    mean_ = real_mean_;
    solution.real = finish_solution(x_real, std::move(weights_real), elapsed);
    mean_ = std::move(nominal_mean);
  }

  const ControlVector correction = pid_.feedback(x_real, nominal_state_, pid_state_);
  Vec applied(correction.dim());
  const ControlVector& u0 = mean_.at(0);
  for (Eigen::Index c = 0; c < applied.size(); ++c) applied[c] = u0[c] + correction[c];
  solution.applied = ControlVector(std::move(applied));

  // The nominal system advances only through the model.
  nominal_state_ =
      dynamics_->step(nominal_state_, mean_.at(0), static_cast<float>(mean_.dt())).first;
  return solution;
}

ControllerSolution TubeMppiController::compute_control(const StateVector& x0) {
  return tube_compute_control(x0).nominal;
}

void TubeMppiController::shift_control_sequence(double elapsed_s, double dt_min) {
  Controller::shift_control_sequence(elapsed_s, dt_min);
  ControlTrajectory nominal_mean = mean_;
  mean_ = real_mean_;
  Controller::shift_control_sequence(elapsed_s, dt_min);
  real_mean_ = mean_;
  mean_ = std::move(nominal_mean);
}

std::unique_ptr<Controller> make_controller(const ScenarioConfig& scenario,
                                            EngineConfig engine_config) {
  const std::vector<std::string> errors = validate(scenario);
  if (!errors.empty()) {
    std::string message = "scenario invalid:";
    for (const auto& e : errors) message += "\n  " + e;
    throw ConfigError(message);
  }

  std::shared_ptr<const DynamicsModel> dynamics = make_dynamics(scenario.dynamics);
  std::shared_ptr<const CostFunction> cost = make_cost(scenario.cost, *dynamics);
  GaussianSamplerConfig sampler = make_sampler_config(scenario, dynamics->dims().n_u);

  MppiSettings settings;
  settings.num_samples = scenario.num_samples;
  settings.iterations = scenario.iterations;
  settings.lambda = scenario.lambda;
  settings.dt = scenario.dt;
  settings.horizon = scenario.horizon;

  const std::string& kind = scenario.controller.kind;
  if (kind == "dmd") {
    if (!scenario.controller.step_size_per_step.empty()) {
      settings.step_sizes.assign(scenario.controller.step_size_per_step.begin(),
                                 scenario.controller.step_size_per_step.end());
    } else {
      settings.step_sizes = {static_cast<float>(scenario.controller.step_size)};
    }
  }

  if (kind == "mppi" || kind == "dmd") {
    return std::make_unique<MppiController>(std::move(dynamics), std::move(cost),
                                            std::move(sampler), std::move(settings),
                                            std::move(engine_config), kind);
  }
  if (kind == "cem") {
    CemSettings cem;
    cem.elite_fraction = scenario.controller.elite_fraction;
    return std::make_unique<CemController>(std::move(dynamics), std::move(cost),
                                           std::move(sampler), std::move(settings), cem,
                                           std::move(engine_config));
  }
  if (kind == "tube") {
    PidGains gains = make_pid_gains(scenario.feedback, dynamics->dims().n_u,
                                    dynamics->dims().n_x, static_cast<float>(scenario.dt));
    return std::make_unique<TubeMppiController>(
        std::move(dynamics), std::move(cost), std::move(sampler), std::move(settings),
        std::move(gains), scenario.controller.nominal_reset_bound, std::move(engine_config));
  }
  throw ConfigError("controller.kind '" + kind + "' is not recognized");
}

}  // namespace smpc
