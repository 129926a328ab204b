#include "smpc/sampling.hpp"

#include <cmath>

namespace smpc {

GaussianSampler::GaussianSampler(GaussianSamplerConfig config, int control_dim)
    : config_(std::move(config)), control_dim_(control_dim), normals_(config_.seed) {
  if (control_dim_ < 1) throw Error("sampler: control_dim must be >= 1");
  if (config_.std_dev.size() == 1 && control_dim_ > 1) {
    config_.std_dev.assign(static_cast<size_t>(control_dim_), config_.std_dev[0]);
  }
  if (static_cast<int>(config_.std_dev.size()) != control_dim_) {
    throw Error("sampler: std_dev needs one entry per control channel");
  }
  for (float s : config_.std_dev) {
    if (!(s > 0.0f)) throw Error("sampler: std_dev entries must be > 0");
  }
  for (const auto& row : config_.std_per_step) {
    if (static_cast<int>(row.size()) != control_dim_) {
      throw Error("sampler: std_per_step rows need one entry per control channel");
    }
    for (float s : row) {
      if (!(s > 0.0f)) throw Error("sampler: std_per_step entries must be > 0");
    }
  }
  if (!(config_.zero_mean_fraction >= 0.0 && config_.zero_mean_fraction <= 1.0)) {
    throw Error("sampler: zero_mean_fraction must be in [0, 1]");
  }
}

NoiseBatch GaussianSampler::generate_samples(const ControlTrajectory& mean, int num_samples,
                                             uint32_t stream, WorkerPool* pool) const {
  if (num_samples < 1) throw Error("sampler: num_samples must be >= 1");
  if (mean.control_dim() != control_dim_) {
    throw Error("sampler: mean trajectory control dimension mismatch");
  }
  const int horizon = mean.horizon();
  if (!config_.std_per_step.empty() &&
      static_cast<int>(config_.std_per_step.size()) != horizon) {
    throw Error("sampler: std_per_step length must equal the horizon");
  }

  NoiseBatch batch;
  batch.num_samples = num_samples;
  batch.horizon = horizon;
  batch.control_dim = control_dim_;
  batch.mean = mean;
  batch.eps.resize(static_cast<size_t>(num_samples) * horizon * control_dim_);
  batch.is_mean_sample.assign(static_cast<size_t>(num_samples), 0);
  batch.is_zero_mean.assign(static_cast<size_t>(num_samples), 0);
  batch.importance_enabled.assign(static_cast<size_t>(num_samples),
                                  config_.importance_sampling ? 1 : 0);

  // Sample 0 is the unperturbed mean when enabled; the zero-mean quota fills
  // from the tail and never claims the mean sample.
  const bool with_mean = config_.include_mean_sample;
  int n_zero = static_cast<int>(std::ceil(config_.zero_mean_fraction * num_samples));
  n_zero = std::min(n_zero, with_mean ? num_samples - 1 : num_samples);
  const int zero_begin = num_samples - n_zero;
  if (with_mean) batch.is_mean_sample[0] = 1;
  for (int m = zero_begin; m < num_samples; ++m) batch.is_zero_mean[m] = 1;

  const int per_sample = horizon * control_dim_;
  auto fill_range = [&](int64_t begin, int64_t end) {
    for (int64_t m = begin; m < end; ++m) {
      float* row = &batch.eps[static_cast<size_t>(m) * per_sample];
      if (batch.is_mean_sample[static_cast<size_t>(m)]) {
        for (int k = 0; k < per_sample; ++k) row[k] = 0.0f;
        continue;
      }
      const bool zero_mean = batch.is_zero_mean[static_cast<size_t>(m)] != 0;
      for (int q = 0; q * 4 < per_sample; ++q) {
        const std::array<float, 4> z =
            normals_.quad(stream, static_cast<uint32_t>(m), static_cast<uint32_t>(q));
        const int base = q * 4;
        const int lanes = std::min(4, per_sample - base);
        for (int lane = 0; lane < lanes; ++lane) {
          const int k = base + lane;
          const int t = k / control_dim_;
          const int c = k % control_dim_;
          float e = std_at(t, c) * z[static_cast<size_t>(lane)];
          if (zero_mean) e -= mean.at(t)[c];
          row[k] = e;
        }
      }
    }
  };

  if (pool != nullptr && pool->size() > 1) {
    pool->parallel_for(num_samples, fill_range);
  } else {
    fill_range(0, num_samples);
  }
  return batch;
}

ControlVector GaussianSampler::read_control_sample(const NoiseBatch& batch, int m, int t,
                                                   const OutputVector& /*y*/) const {
  if (m < 0 || m >= batch.num_samples || t < 0 || t >= batch.horizon) {
    throw Error("sampler: read_control_sample index out of range");
  }
  Vec v(batch.control_dim);
  const ControlVector& mean_t = batch.mean.at(t);
  for (int c = 0; c < batch.control_dim; ++c) {
    v[c] = mean_t[c] + batch.eps_at(m, t, c);
  }
  return ControlVector(std::move(v));
}

std::vector<double> GaussianSampler::importance_weight_adjustment(
    const NoiseBatch& batch, const ControlTrajectory& mean, double lambda) const {
  if (mean.horizon() != batch.horizon || mean.control_dim() != batch.control_dim) {
    throw Error("sampler: importance adjustment trajectory shape mismatch");
  }
  std::vector<double> adjustment(static_cast<size_t>(batch.num_samples), 0.0);
  for (int m = 0; m < batch.num_samples; ++m) {
    if (!batch.importance_enabled[static_cast<size_t>(m)]) continue;
    double acc = 0.0;
    for (int t = 0; t < batch.horizon; ++t) {
      const ControlVector& u_t = mean.at(t);
      for (int c = 0; c < batch.control_dim; ++c) {
        const double sigma = std_at(t, c);
        acc += static_cast<double>(u_t[c]) * batch.eps_at(m, t, c) / (sigma * sigma);
      }
    }
    adjustment[static_cast<size_t>(m)] = lambda * acc;
  }
  return adjustment;
}

GaussianSamplerConfig make_sampler_config(const ScenarioConfig& scenario, int control_dim) {
  GaussianSamplerConfig config;
  config.std_dev.assign(scenario.control_std.begin(), scenario.control_std.end());
  if (config.std_dev.size() == 1 && control_dim > 1) {
    config.std_dev.assign(static_cast<size_t>(control_dim), config.std_dev[0]);
  }
  for (const auto& row : scenario.sampler.std_per_step) {
    config.std_per_step.emplace_back(row.begin(), row.end());
  }
  config.zero_mean_fraction = scenario.sampler.zero_mean_fraction;
  config.include_mean_sample = scenario.sampler.include_mean_sample;
  config.importance_sampling = scenario.sampler.importance_sampling;
  config.seed = scenario.rng_seed;
  return config;
}

}  // namespace smpc
