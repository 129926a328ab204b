#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace smpc {

/// Largest state/control/output dimension supported by the fixed-capacity
/// vector types. Keeps all per-rollout scratch on the stack.
inline constexpr int kMaxDim = 8;

/// Runtime-sized vector with compile-time capacity (no heap allocation).
using Vec = Eigen::Matrix<float, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// n_u x n_x gain matrix with the same capacity bound.
using GainMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed configuration files or invalid parameter values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Wraps an angle to (-pi, pi].
inline float wrap_angle(float a) {
  constexpr float kTwoPi = 6.283185307179586f;
  a = std::fmod(a, kTwoPi);
  if (a <= -3.14159265358979f) a += kTwoPi;
  if (a > 3.14159265358979f) a -= kTwoPi;
  return a;
}

struct ModelDims {
  int n_x = 0;
  int n_u = 0;
  int n_y = 0;

  ModelDims() = default;
  ModelDims(int nx, int nu, int ny) : n_x(nx), n_u(nu), n_y(ny) {
    if (n_x < 1 || n_u < 1 || n_y < 1) {
      throw Error("ModelDims: all dimensions must be >= 1, got (" + std::to_string(n_x) + ", " +
                  std::to_string(n_u) + ", " + std::to_string(n_y) + ")");
    }
    if (n_x > kMaxDim || n_u > kMaxDim || n_y > kMaxDim) {
      throw Error("ModelDims: dimension exceeds capacity " + std::to_string(kMaxDim));
    }
  }

  bool operator==(const ModelDims&) const = default;
};

namespace detail {

/// Shared implementation of the three boundary-checked vector types.
/// Construction validates finiteness; entries are immutable afterwards.
template <typename Tag>
class TypedVec {
 public:
  TypedVec() = default;

  explicit TypedVec(Vec values) : v_(std::move(values)) {
    if (!v_.allFinite()) {
      for (Eigen::Index i = 0; i < v_.size(); ++i) {
        if (!std::isfinite(v_[i])) {
          throw Error(std::string(Tag::name) + " vector has non-finite entry at channel " +
                      std::to_string(i));
        }
      }
    }
  }

  TypedVec(std::initializer_list<float> values) : TypedVec(from_list(values)) {}

  static TypedVec zeros(Eigen::Index n) {
    TypedVec out;
    out.v_ = Vec::Zero(n);
    return out;
  }

  Eigen::Index dim() const { return v_.size(); }
  float operator[](Eigen::Index i) const { return v_[i]; }
  const Vec& vec() const { return v_; }
  const float* data() const { return v_.data(); }

  bool operator==(const TypedVec& other) const {
    return v_.size() == other.v_.size() && v_ == other.v_;
  }

 private:
  static Vec from_list(std::initializer_list<float> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (float x : values) v[i++] = x;
    return v;
  }

  Vec v_;
};

struct StateTag {
  static constexpr const char* name = "state";
};
struct ControlTag {
  static constexpr const char* name = "control";
};
struct OutputTag {
  static constexpr const char* name = "output";
};

}  // namespace detail

using StateVector = detail::TypedVec<detail::StateTag>;
using ControlVector = detail::TypedVec<detail::ControlTag>;
using OutputVector = detail::TypedVec<detail::OutputTag>;

/// Piecewise-constant control sequence over a fixed horizon.
class ControlTrajectory {
 public:
  ControlTrajectory() = default;

  ControlTrajectory(double dt, std::vector<ControlVector> controls)
      : dt_(dt), controls_(std::move(controls)) {
    if (controls_.empty()) throw Error("ControlTrajectory: horizon must be >= 1");
    if (!(dt_ > 0.0)) throw Error("ControlTrajectory: dt must be > 0");
    const Eigen::Index n_u = controls_.front().dim();
    for (const auto& u : controls_) {
      if (u.dim() != n_u) throw Error("ControlTrajectory: inconsistent control dimension");
    }
  }

  static ControlTrajectory zeros(int horizon, double dt, int n_u) {
    std::vector<ControlVector> c(static_cast<size_t>(horizon), ControlVector::zeros(n_u));
    return ControlTrajectory(dt, std::move(c));
  }

  int horizon() const { return static_cast<int>(controls_.size()); }
  double dt() const { return dt_; }
  int control_dim() const { return static_cast<int>(controls_.front().dim()); }
  const ControlVector& at(int t) const { return controls_.at(static_cast<size_t>(t)); }
  const std::vector<ControlVector>& controls() const { return controls_; }

  bool operator==(const ControlTrajectory& other) const {
    return dt_ == other.dt_ && controls_ == other.controls_;
  }

 private:
  double dt_ = 0.0;
  std::vector<ControlVector> controls_;
};

/// Output sequence produced by rolling a ControlTrajectory through a model;
/// length always matches the producing trajectory's horizon.
struct OutputTrajectory {
  std::vector<OutputVector> outputs;

  int horizon() const { return static_cast<int>(outputs.size()); }
  bool operator==(const OutputTrajectory&) const = default;
};

}  // namespace smpc
