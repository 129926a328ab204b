#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smpc/scenario.hpp"
#include "smpc/types.hpp"

namespace smpc {

/// Continuous-time model integrated with explicit Euler. Raw float-pointer
/// entry points are the rollout hot path; the typed overloads validate
/// dimensions and finiteness for boundary use.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  const ModelDims& dims() const { return dims_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& state_names() const { return state_names_; }

  /// Indices of state channels that live on the circle and are wrapped to
  /// (-pi, pi] after every step.
  const std::vector<int>& angular_state_channels() const { return angular_channels_; }

  /// Per-channel control bounds; empty vectors mean unbounded.
  const std::vector<float>& control_lower() const { return control_lower_; }
  const std::vector<float>& control_upper() const { return control_upper_; }

  virtual void state_derivative(const float* x, const float* u, float* dx) const = 0;

  /// Copies u into out with bounds applied (identity when unbounded).
  void clamp_control(const float* u, float* out) const;

  /// Euler step with control clamping, angle wrapping, and observation:
  /// x_next = x + dt * f(x, clamp(u)), y = g(x_next, clamp(u)).
  void step_raw(const float* x, const float* u, float dt, float* x_next, float* y) const;

  StateVector state_derivative(const StateVector& x, const ControlVector& u) const;
  std::pair<StateVector, OutputVector> step(const StateVector& x, const ControlVector& u,
                                            float dt) const;

  /// Observation of a state under a (clamped) control, without stepping.
  OutputVector observation(const StateVector& x, const ControlVector& u) const;

  StateVector zero_state() const { return StateVector::zeros(dims_.n_x); }

  /// Builds a state from named channel values; unnamed channels are zero.
  StateVector state_from_named_values(const std::map<std::string, double>& values) const;

  /// Interpolates between two states at alpha in [0, 1], taking the shortest
  /// arc on angular channels.
  StateVector interpolate_states(const StateVector& a, const StateVector& b, float alpha) const;

 protected:
  DynamicsModel(ModelDims dims, std::string name, std::vector<std::string> state_names);

  /// Default observation copies the state (requires n_y == n_x).
  virtual void observe(const float* x, const float* u, float* y) const;

  void set_angular_channels(std::vector<int> channels) { angular_channels_ = std::move(channels); }
  void set_control_bounds(std::vector<float> lower, std::vector<float> upper);

 private:
  ModelDims dims_;
  std::string name_;
  std::vector<std::string> state_names_;
  std::vector<int> angular_channels_;
  std::vector<float> control_lower_;
  std::vector<float> control_upper_;
};

/// Kinematic unicycle: state (x, y, yaw), controls (speed, yaw rate).
class UnicycleModel : public DynamicsModel {
 public:
  UnicycleModel();
  using DynamicsModel::state_derivative;
  void state_derivative(const float* x, const float* u, float* dx) const override;
};

struct CartpoleParams {
  float cart_mass = 1.0f;
  float pole_mass = 1.0f;
  float pole_length = 1.0f;
  float gravity = 9.81f;
};

/// Cart with a point-mass pendulum, theta = 0 hanging down, no friction.
/// State (x, x_dot, theta, theta_dot), control (force).
class CartpoleModel : public DynamicsModel {
 public:
  explicit CartpoleModel(CartpoleParams params = {});
  using DynamicsModel::state_derivative;
  void state_derivative(const float* x, const float* u, float* dx) const override;

  const CartpoleParams& params() const { return params_; }

 private:
  CartpoleParams params_;
};

struct DiffDriveParams {
  float wheel_radius = 1.0f;
  float wheel_length = 1.0f;
  float v_min = -0.35f;
  float v_max = 0.5f;
  float w_min = -0.5f;
  float w_max = 0.5f;
};

/// Differential-drive robot with body-velocity controls (v, omega), clamped
/// to the configured bounds. Wheel geometry is kept for a wheel-speed control
/// variant but unused by the default control space.
class DiffDriveModel : public DynamicsModel {
 public:
  explicit DiffDriveModel(DiffDriveParams params = {});
  using DynamicsModel::state_derivative;
  void state_derivative(const float* x, const float* u, float* dx) const override;

  const DiffDriveParams& params() const { return params_; }

 private:
  DiffDriveParams params_;
};

/// Planar double integrator: state (x, y, v_x, v_y), controls (a_x, a_y).
class DoubleIntegrator2DModel : public DynamicsModel {
 public:
  DoubleIntegrator2DModel();
  using DynamicsModel::state_derivative;
  void state_derivative(const float* x, const float* u, float* dx) const override;
};

std::unique_ptr<DynamicsModel> make_dynamics(const DynamicsSection& section);

}  // namespace smpc
