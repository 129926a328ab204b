#pragma once

#include <cstdint>
#include <vector>

#include "smpc/rng.hpp"
#include "smpc/scenario.hpp"
#include "smpc/types.hpp"
#include "smpc/worker_pool.hpp"

namespace smpc {

struct GaussianSamplerConfig {
  // Per-channel std deviations, one entry per control channel.
  std::vector<float> std_dev;
  // Optional horizon x n_u override; empty means std_dev applies at every t.
  std::vector<std::vector<float>> std_per_step;
  // Fraction of samples drawn about zero instead of the mean trajectory.
  double zero_mean_fraction = 0.0;
  // Reserve sample 0 for the unperturbed mean trajectory.
  bool include_mean_sample = true;
  // Add the control-noise likelihood term to sampled costs by default.
  bool importance_sampling = true;
  uint64_t seed = 0;
};

/// One batch of sampled control perturbations. eps is stored relative to the
/// mean trajectory the batch was generated around (v = mean + eps), so
/// zero-mean samples carry eps = draw - mean.
struct NoiseBatch {
  int num_samples = 0;
  int horizon = 0;
  int control_dim = 0;
  ControlTrajectory mean;
  std::vector<float> eps;
  std::vector<uint8_t> is_mean_sample;
  std::vector<uint8_t> is_zero_mean;
  std::vector<uint8_t> importance_enabled;

  size_t index(int m, int t, int c) const {
    return (static_cast<size_t>(m) * horizon + t) * control_dim + c;
  }
  float eps_at(int m, int t, int c) const { return eps[index(m, t, c)]; }
  const float* eps_row(int m, int t) const { return &eps[index(m, t, 0)]; }
};

/// Gaussian control sampler with counter-based draws: the batch produced for
/// a given (seed, stream, M, mean) is identical regardless of worker count or
/// call ordering.
class GaussianSampler {
 public:
  GaussianSampler(GaussianSamplerConfig config, int control_dim);

  const GaussianSamplerConfig& config() const { return config_; }
  int control_dim() const { return control_dim_; }
  float std_at(int t, int c) const {
    return config_.std_per_step.empty() ? config_.std_dev[static_cast<size_t>(c)]
                                        : config_.std_per_step[static_cast<size_t>(t)]
                                                              [static_cast<size_t>(c)];
  }

  /// Draws num_samples perturbations of the mean trajectory. Distinct stream
  /// values give independent batches under the same seed.
  NoiseBatch generate_samples(const ControlTrajectory& mean, int num_samples, uint32_t stream,
                              WorkerPool* pool = nullptr) const;

  /// Reconstructs the sampled control at (m, t), before model bounds are
  /// applied. The output argument exists for output-dependent distributions
  /// and is ignored by the Gaussian sampler.
  ControlVector read_control_sample(const NoiseBatch& batch, int m, int t,
                                    const OutputVector& y) const;

  /// Per-sample cost adjustment lambda * sum_t u_t' Sigma^-1 eps_t, where u
  /// is the given mean trajectory. Samples with importance sampling disabled
  /// contribute 0.
  std::vector<double> importance_weight_adjustment(const NoiseBatch& batch,
                                                   const ControlTrajectory& mean,
                                                   double lambda) const;

 private:
  GaussianSamplerConfig config_;
  int control_dim_;
  NormalStream normals_;
};

/// Assembles the sampler config from a scenario, broadcasting a single
/// control_std entry across all control channels.
GaussianSamplerConfig make_sampler_config(const ScenarioConfig& scenario, int control_dim);

}  // namespace smpc
