#include "smpc/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace smpc {
namespace {

double steady_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

double median_of(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const size_t n = samples.size();
  if (n % 2 == 1) return samples[n / 2];
  return 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

/// Mean trajectories copied into one contiguous [s][t][c] buffer so the
/// per-step loops touch flat memory.
std::vector<float> flatten_means(const RolloutRequest& req) {
  const int T = req.noise->horizon;
  const int n_u = req.noise->control_dim;
  std::vector<float> flat(req.means.size() * static_cast<size_t>(T) * n_u);
  for (size_t s = 0; s < req.means.size(); ++s) {
    float* dst = &flat[s * static_cast<size_t>(T) * n_u];
    for (int t = 0; t < T; ++t) {
      const ControlVector& mu = req.means[s].at(t);
      for (int c = 0; c < n_u; ++c) dst[t * n_u + c] = mu[c];
    }
  }
  return flat;
}

/// Sampled control at (m, t) about the given flat mean row, with model
/// bounds applied.
inline void sampled_control(const RolloutRequest& req, const float* mean_row, int m, int t,
                            float* u_clamped) {
  const float* eps = req.noise->eps_row(m, t);
  const int n_u = req.noise->control_dim;
  float u[kMaxDim];
  for (int c = 0; c < n_u; ++c) u[c] = mean_row[c] + eps[c];
  req.dynamics->clamp_control(u, u_clamped);
}

inline void check_state_finite(const float* x, int n_x, int m, int t) {
  for (int ch = 0; ch < n_x; ++ch) {
    if (!std::isfinite(x[ch])) {
      throw Error("rollout produced non-finite state channel " + std::to_string(ch) +
                  " at sample " + std::to_string(m) + " timestep " + std::to_string(t));
    }
  }
}

inline void check_cost_finite(double c, int m, int t) {
  if (!std::isfinite(c) || c < 0.0) {
    throw Error("rollout produced invalid running cost at sample " + std::to_string(m) +
                " timestep " + std::to_string(t));
  }
}

}  // namespace

OutputTrajectory OutputBuffer::trajectory(int s, int m) const {
  OutputTrajectory traj;
  traj.outputs.reserve(static_cast<size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    Vec y(output_dim);
    const float* src = at(s, m, t);
    for (int c = 0; c < output_dim; ++c) y[c] = src[c];
    traj.outputs.emplace_back(std::move(y));
  }
  return traj;
}

RolloutEngine::RolloutEngine(EngineConfig config)
    : config_(std::move(config)), pool_(std::make_unique<WorkerPool>(config_.num_workers)) {
  choice_.kind = config_.strategy;
  if (config_.strategy != StrategyChoice::Kind::kAuto) {
    resolved_ = config_.strategy == StrategyChoice::Kind::kFused ? EvalStrategy::kFused
                                                                 : EvalStrategy::kSplit;
  }
}

void RolloutEngine::validate(const RolloutRequest& req) const {
  if (req.dynamics == nullptr || req.cost == nullptr || req.noise == nullptr) {
    throw Error("rollout request is missing dynamics, cost, or noise");
  }
  const size_t systems = req.initial_states.size();
  if (systems < 1 || systems > 2 || req.means.size() != systems) {
    throw Error("rollout request needs 1 or 2 systems with matching means");
  }
  const ModelDims& dims = req.dynamics->dims();
  if (req.cost->output_dim() != dims.n_y || req.cost->control_dim() != dims.n_u) {
    throw Error("rollout request cost dimensions do not match the model");
  }
  if (req.noise->num_samples < 1) throw Error("rollout request noise batch is empty");
  if (req.noise->control_dim != dims.n_u) {
    throw Error("rollout request noise control dimension does not match the model");
  }
  for (size_t s = 0; s < systems; ++s) {
    if (req.initial_states[s].dim() != dims.n_x) {
      throw Error("rollout request initial state dimension does not match the model");
    }
    if (req.means[s].horizon() != req.noise->horizon ||
        req.means[s].control_dim() != req.noise->control_dim) {
      throw Error("rollout request mean trajectory shape does not match the noise batch");
    }
    if (req.means[s].dt() != req.means[0].dt()) {
      throw Error("rollout request mean trajectories must share dt");
    }
  }
  if (!req.cost_adjustments.empty()) {
    if (req.cost_adjustments.size() != systems) {
      throw Error("rollout request cost adjustments must cover every system");
    }
    for (const auto& per_sample : req.cost_adjustments) {
      if (static_cast<int>(per_sample.size()) != req.noise->num_samples) {
        throw Error("rollout request cost adjustments must cover every sample");
      }
    }
  }
}

RolloutResult RolloutEngine::rollout_split(const RolloutRequest& req) {
  validate(req);
  const ModelDims& dims = req.dynamics->dims();
  const int S = static_cast<int>(req.initial_states.size());
  const int M = req.noise->num_samples;
  const int T = req.noise->horizon;
  const float dt = static_cast<float>(req.means[0].dt());

  RolloutResult result;
  result.num_systems = S;
  result.num_samples = M;
  result.horizon = T;
  result.strategy = EvalStrategy::kSplit;
  result.outputs.emplace();
  OutputBuffer& buf = *result.outputs;
  buf.num_systems = S;
  buf.num_samples = M;
  buf.horizon = T;
  buf.output_dim = dims.n_y;
  buf.data.resize(static_cast<size_t>(S) * M * T * dims.n_y);

  const std::vector<float> flat_means = flatten_means(req);
  const int n_u = req.noise->control_dim;

  // Phase 1: propagate dynamics, parallel over (system, sample).
  pool_->parallel_for(static_cast<int64_t>(S) * M, [&](int64_t begin, int64_t end) {
    float x[kMaxDim];
    float x_next[kMaxDim];
    float u_c[kMaxDim];
    for (int64_t idx = begin; idx < end; ++idx) {
      const int s = static_cast<int>(idx / M);
      const int m = static_cast<int>(idx % M);
      const float* mean_base = &flat_means[static_cast<size_t>(s) * T * n_u];
      const StateVector& x0 = req.initial_states[static_cast<size_t>(s)];
      for (int ch = 0; ch < dims.n_x; ++ch) x[ch] = x0[ch];
      for (int t = 0; t < T; ++t) {
        sampled_control(req, mean_base + t * n_u, m, t, u_c);
        req.dynamics->step_raw(x, u_c, dt, x_next, buf.at(s, m, t));
        check_state_finite(x_next, dims.n_x, m, t);
        std::copy(x_next, x_next + dims.n_x, x);
      }
    }
  });

  // Phase 2: score stored outputs, parallel over (system, sample, timestep).
  std::vector<double> cost_grid(static_cast<size_t>(S) * M * T);
  pool_->parallel_for(static_cast<int64_t>(S) * M * T, [&](int64_t begin, int64_t end) {
    float u_c[kMaxDim];
    for (int64_t idx = begin; idx < end; ++idx) {
      const int s = static_cast<int>(idx / (static_cast<int64_t>(M) * T));
      const int64_t rem = idx % (static_cast<int64_t>(M) * T);
      const int m = static_cast<int>(rem / T);
      const int t = static_cast<int>(rem % T);
      sampled_control(req, &flat_means[(static_cast<size_t>(s) * T + t) * n_u], m, t, u_c);
      const double c = req.cost->running_cost_raw(buf.at(s, m, t), u_c, t);
      check_cost_finite(c, m, t);
      cost_grid[static_cast<size_t>(idx)] = c;
    }
  });

  // Reduce in fixed timestep order so totals do not depend on scheduling.
  result.costs.assign(static_cast<size_t>(S), std::vector<double>(static_cast<size_t>(M)));
  pool_->parallel_for(static_cast<int64_t>(S) * M, [&](int64_t begin, int64_t end) {
    for (int64_t idx = begin; idx < end; ++idx) {
      const int s = static_cast<int>(idx / M);
      const int m = static_cast<int>(idx % M);
      const double* row = &cost_grid[static_cast<size_t>(idx) * T];
      double total = 0.0;
      for (int t = 0; t < T; ++t) total += row[t];
      const double terminal = req.cost->terminal_cost_raw(buf.at(s, m, T - 1));
      check_cost_finite(terminal, m, T - 1);
      total += terminal;
      if (!req.cost_adjustments.empty()) {
        total += req.cost_adjustments[static_cast<size_t>(s)][static_cast<size_t>(m)];
      }
      result.costs[static_cast<size_t>(s)][static_cast<size_t>(m)] = total;
    }
  });
  return result;
}

void RolloutEngine::run_sample_fused(const RolloutRequest& req, const float* mean_base, int m,
                                     int s, double& cost_out, float* output_sink) const {
  const ModelDims& dims = req.dynamics->dims();
  const int T = req.noise->horizon;
  const int n_u = req.noise->control_dim;
  const float dt = static_cast<float>(req.means[0].dt());
  float x[kMaxDim];
  float x_next[kMaxDim];
  float y[kMaxDim];
  float u_c[kMaxDim];
  const StateVector& x0 = req.initial_states[static_cast<size_t>(s)];
  for (int ch = 0; ch < dims.n_x; ++ch) x[ch] = x0[ch];
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    sampled_control(req, mean_base + t * n_u, m, t, u_c);
    req.dynamics->step_raw(x, u_c, dt, x_next, y);
    check_state_finite(x_next, dims.n_x, m, t);
    const double c = req.cost->running_cost_raw(y, u_c, t);
    check_cost_finite(c, m, t);
    total += c;
    if (output_sink != nullptr) {
      std::copy(y, y + dims.n_y, output_sink + static_cast<size_t>(t) * dims.n_y);
    }
    std::copy(x_next, x_next + dims.n_x, x);
  }
  const double terminal = req.cost->terminal_cost_raw(y);
  check_cost_finite(terminal, m, T - 1);
  cost_out = total + terminal;
}

RolloutResult RolloutEngine::rollout_fused(const RolloutRequest& req) {
  validate(req);
  const int S = static_cast<int>(req.initial_states.size());
  const int M = req.noise->num_samples;
  const int T = req.noise->horizon;
  const int n_u = req.noise->control_dim;

  RolloutResult result;
  result.num_systems = S;
  result.num_samples = M;
  result.horizon = T;
  result.strategy = EvalStrategy::kFused;
  result.costs.assign(static_cast<size_t>(S), std::vector<double>(static_cast<size_t>(M)));

  const std::vector<float> flat_means = flatten_means(req);

  pool_->parallel_for(static_cast<int64_t>(S) * M, [&](int64_t begin, int64_t end) {
    for (int64_t idx = begin; idx < end; ++idx) {
      const int s = static_cast<int>(idx / M);
      const int m = static_cast<int>(idx % M);
      double total = 0.0;
      run_sample_fused(req, &flat_means[static_cast<size_t>(s) * T * n_u], m, s, total, nullptr);
      if (!req.cost_adjustments.empty()) {
        total += req.cost_adjustments[static_cast<size_t>(s)][static_cast<size_t>(m)];
      }
      result.costs[static_cast<size_t>(s)][static_cast<size_t>(m)] = total;
    }
  });
  return result;
}

size_t RolloutEngine::fused_scratch_bytes(const RolloutRequest& req) {
  if (req.dynamics == nullptr) throw Error("fused_scratch_bytes needs a dynamics model");
  const ModelDims& dims = req.dynamics->dims();
  // Per-worker fused loop state: x, x_next, derivative, output, raw and
  // clamped control buffers, plus the two double accumulators.
  return sizeof(float) * static_cast<size_t>(3 * dims.n_x + dims.n_y + 3 * dims.n_u) +
         2 * sizeof(double);
}

StrategyChoice RolloutEngine::auto_select(const RolloutRequest& representative, int trials) {
  validate(representative);
  if (fused_scratch_bytes(representative) > config_.fused_scratch_budget_bytes) {
    choice_ = StrategyChoice{StrategyChoice::Kind::kSplit, std::nullopt};
    resolved_ = EvalStrategy::kSplit;
    return choice_;
  }

  const int n = std::max(3, trials > 0 ? trials : config_.autotune_trials);
  std::function<double()> clock = config_.clock_ms;
  if (!clock) clock = steady_ms;
  auto time_strategy = [&](EvalStrategy strategy) {
    auto run_once = [&] {
      if (strategy == EvalStrategy::kSplit) {
        rollout_split(representative);
      } else {
        rollout_fused(representative);
      }
    };
    std::vector<double> times;
    times.reserve(static_cast<size_t>(n));
    for (int i = 0; i < 2; ++i) run_once();
    for (int i = 0; i < n; ++i) {
      const double t0 = clock();
      run_once();
      times.push_back(clock() - t0);
    }
    return median_of(std::move(times));
  };

  StrategyTimings timings;
  timings.split_median_ms = time_strategy(EvalStrategy::kSplit);
  timings.fused_median_ms = time_strategy(EvalStrategy::kFused);

  const bool fused_wins = timings.fused_median_ms < timings.split_median_ms;
  choice_.kind = fused_wins ? StrategyChoice::Kind::kFused : StrategyChoice::Kind::kSplit;
  choice_.timings = timings;
  resolved_ = fused_wins ? EvalStrategy::kFused : EvalStrategy::kSplit;
  return choice_;
}

void RolloutEngine::set_strategy(StrategyChoice::Kind kind) {
  choice_ = StrategyChoice{kind, std::nullopt};
  if (kind == StrategyChoice::Kind::kAuto) {
    resolved_.reset();
  } else {
    resolved_ = kind == StrategyChoice::Kind::kFused ? EvalStrategy::kFused
                                                     : EvalStrategy::kSplit;
  }
}

EvalStrategy RolloutEngine::resolved_strategy(const RolloutRequest& representative) {
  if (!resolved_) auto_select(representative);
  return *resolved_;
}

RolloutResult RolloutEngine::rollout(const RolloutRequest& request) {
  const EvalStrategy strategy = resolved_strategy(request);
  return strategy == EvalStrategy::kFused ? rollout_fused(request) : rollout_split(request);
}

WeightResult RolloutEngine::compute_weights(std::span<const double> costs, double lambda) {
  if (!(lambda > 0.0)) throw Error("compute_weights: lambda must be > 0");
  if (costs.empty()) throw Error("compute_weights: cost list is empty");
  for (size_t m = 0; m < costs.size(); ++m) {
    if (!std::isfinite(costs[m])) {
      throw Error("compute_weights: non-finite cost at sample " + std::to_string(m));
    }
  }

  WeightResult result;
  result.baseline = *std::min_element(costs.begin(), costs.end());
  result.weights.resize(costs.size());
  double eta = 0.0;
  for (size_t m = 0; m < costs.size(); ++m) {
    const double e = std::exp(-(costs[m] - result.baseline) / lambda);
    result.weights[m] = e;
    eta += e;
  }
  result.normalizer = eta;
  for (double& w : result.weights) w /= eta;
  return result;
}

ControlTrajectory RolloutEngine::weighted_update(const ControlTrajectory& mean,
                                                 const NoiseBatch& batch,
                                                 const WeightResult& weights,
                                                 std::span<const float> step_sizes) {
  if (mean.horizon() != batch.horizon || mean.control_dim() != batch.control_dim) {
    throw Error("weighted_update: mean trajectory shape does not match the noise batch");
  }
  if (static_cast<int>(weights.weights.size()) != batch.num_samples) {
    throw Error("weighted_update: weight count does not match the noise batch");
  }
  const int T = batch.horizon;
  const int n_u = batch.control_dim;
  if (!(step_sizes.empty() || step_sizes.size() == 1 ||
        step_sizes.size() == static_cast<size_t>(T))) {
    throw Error("weighted_update: step sizes must be empty, scalar, or one per timestep");
  }
  for (float g : step_sizes) {
    if (!(g > 0.0f && g <= 1.0f)) throw Error("weighted_update: step sizes must be in (0, 1]");
  }

  // Weighted noise average, accumulated in double with samples in index
  // order for run-to-run reproducibility.
  std::vector<double> acc(static_cast<size_t>(T) * n_u, 0.0);
  for (int m = 0; m < batch.num_samples; ++m) {
    const double w = weights.weights[static_cast<size_t>(m)];
    const float* row = &batch.eps[static_cast<size_t>(m) * T * n_u];
    for (int k = 0; k < T * n_u; ++k) acc[static_cast<size_t>(k)] += w * row[k];
  }

  std::vector<ControlVector> controls;
  controls.reserve(static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    const double gamma = step_sizes.empty()
                             ? 1.0
                             : static_cast<double>(
                                   step_sizes[step_sizes.size() == 1 ? 0 : static_cast<size_t>(t)]);
    Vec u(n_u);
    const ControlVector& mu = mean.at(t);
    for (int c = 0; c < n_u; ++c) {
      u[c] = static_cast<float>(mu[c] + gamma * acc[static_cast<size_t>(t) * n_u + c]);
    }
    controls.emplace_back(std::move(u));
  }
  return ControlTrajectory(mean.dt(), std::move(controls));
}

std::vector<OutputTrajectory> RolloutEngine::export_sample_trajectories(
    const RolloutRequest& request, const RolloutResult& result, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error("export_sample_trajectories: fraction must be in [0, 1]");
  }
  const int M = result.num_samples;
  const int k = static_cast<int>(std::ceil(fraction * M));
  if (k == 0) return {};

  std::vector<int> order(static_cast<size_t>(M));
  std::iota(order.begin(), order.end(), 0);
  const std::vector<double>& costs = result.costs.at(0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    if (costs[static_cast<size_t>(a)] != costs[static_cast<size_t>(b)]) {
      return costs[static_cast<size_t>(a)] < costs[static_cast<size_t>(b)];
    }
    return a < b;
  });

  std::vector<OutputTrajectory> selected;
  selected.reserve(static_cast<size_t>(k));
  if (result.outputs.has_value()) {
    for (int i = 0; i < k; ++i) selected.push_back(result.outputs->trajectory(0, order[i]));
    return selected;
  }

  // Fused evaluation kept no trajectories; re-roll just the chosen samples.
  validate(request);
  const int n_y = request.dynamics->dims().n_y;
  const std::vector<float> flat_means = flatten_means(request);
  std::vector<float> sink(static_cast<size_t>(result.horizon) * n_y);
  OutputBuffer buf;
  buf.num_systems = 1;
  buf.num_samples = 1;
  buf.horizon = result.horizon;
  buf.output_dim = n_y;
  for (int i = 0; i < k; ++i) {
    double unused = 0.0;
    run_sample_fused(request, flat_means.data(), order[static_cast<size_t>(i)], 0, unused,
                     sink.data());
    buf.data = sink;
    selected.push_back(buf.trajectory(0, 0));
  }
  return selected;
}

}  // namespace smpc
