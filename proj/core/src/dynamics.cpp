#include "smpc/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace smpc {

DynamicsModel::DynamicsModel(ModelDims dims, std::string name,
                             std::vector<std::string> state_names)
    : dims_(dims), name_(std::move(name)), state_names_(std::move(state_names)) {
  if (static_cast<int>(state_names_.size()) != dims_.n_x) {
    throw Error(name_ + ": expected " + std::to_string(dims_.n_x) + " state names");
  }
}

void DynamicsModel::set_control_bounds(std::vector<float> lower, std::vector<float> upper) {
  if (static_cast<int>(lower.size()) != dims_.n_u ||
      static_cast<int>(upper.size()) != dims_.n_u) {
    throw Error(name_ + ": control bounds must have one entry per control channel");
  }
  for (int i = 0; i < dims_.n_u; ++i) {
    if (!(lower[i] < upper[i])) {
      throw Error(name_ + ": control bound lower must be < upper on channel " +
                  std::to_string(i));
    }
  }
  control_lower_ = std::move(lower);
  control_upper_ = std::move(upper);
}

void DynamicsModel::clamp_control(const float* u, float* out) const {
  if (control_lower_.empty()) {
    std::copy(u, u + dims_.n_u, out);
    return;
  }
  for (int i = 0; i < dims_.n_u; ++i) {
    out[i] = std::min(std::max(u[i], control_lower_[i]), control_upper_[i]);
  }
}

void DynamicsModel::observe(const float* x, const float* /*u*/, float* y) const {
  std::copy(x, x + dims_.n_x, y);
}

void DynamicsModel::step_raw(const float* x, const float* u, float dt, float* x_next,
                             float* y) const {
  float u_c[kMaxDim];
  float dx[kMaxDim];
  clamp_control(u, u_c);
  state_derivative(x, u_c, dx);
  for (int i = 0; i < dims_.n_x; ++i) x_next[i] = x[i] + dt * dx[i];
  for (int ch : angular_channels_) x_next[ch] = wrap_angle(x_next[ch]);
  observe(x_next, u_c, y);
}

StateVector DynamicsModel::state_derivative(const StateVector& x, const ControlVector& u) const {
  if (x.dim() != dims_.n_x || u.dim() != dims_.n_u) {
    throw Error(name_ + ": state_derivative dimension mismatch");
  }
  Vec dx(dims_.n_x);
  state_derivative(x.data(), u.data(), dx.data());
  return StateVector(std::move(dx));
}

std::pair<StateVector, OutputVector> DynamicsModel::step(const StateVector& x,
                                                         const ControlVector& u,
                                                         float dt) const {
  if (x.dim() != dims_.n_x || u.dim() != dims_.n_u) {
    throw Error(name_ + ": step dimension mismatch");
  }
  Vec x_next(dims_.n_x);
  Vec y(dims_.n_y);
  step_raw(x.data(), u.data(), dt, x_next.data(), y.data());
  return {StateVector(std::move(x_next)), OutputVector(std::move(y))};
}

OutputVector DynamicsModel::observation(const StateVector& x, const ControlVector& u) const {
  if (x.dim() != dims_.n_x || u.dim() != dims_.n_u) {
    throw Error(name_ + ": observation dimension mismatch");
  }
  float u_c[kMaxDim];
  clamp_control(u.data(), u_c);
  Vec y(dims_.n_y);
  observe(x.data(), u_c, y.data());
  return OutputVector(std::move(y));
}

StateVector DynamicsModel::state_from_named_values(
    const std::map<std::string, double>& values) const {
  Vec x = Vec::Zero(dims_.n_x);
  for (const auto& [key, value] : values) {
    const auto it = std::find(state_names_.begin(), state_names_.end(), key);
    if (it == state_names_.end()) {
      std::string valid;
      for (const auto& n : state_names_) {
        if (!valid.empty()) valid += ", ";
        valid += n;
      }
      throw Error(name_ + ": unknown state channel '" + key + "' (valid: " + valid + ")");
    }
    x[static_cast<Eigen::Index>(it - state_names_.begin())] = static_cast<float>(value);
  }
  return StateVector(std::move(x));
}

StateVector DynamicsModel::interpolate_states(const StateVector& a, const StateVector& b,
                                              float alpha) const {
  if (a.dim() != dims_.n_x || b.dim() != dims_.n_x) {
    throw Error(name_ + ": interpolate_states dimension mismatch");
  }
  if (!(alpha >= 0.0f && alpha <= 1.0f)) {
    throw Error(name_ + ": interpolation parameter must be in [0, 1]");
  }
  Vec out(dims_.n_x);
  for (int i = 0; i < dims_.n_x; ++i) out[i] = a[i] + alpha * (b[i] - a[i]);
  for (int ch : angular_channels_) {
    out[ch] = wrap_angle(a[ch] + alpha * wrap_angle(b[ch] - a[ch]));
  }
  return StateVector(std::move(out));
}

UnicycleModel::UnicycleModel()
    : DynamicsModel(ModelDims(3, 2, 3), "unicycle", {"X", "Y", "YAW"}) {
  set_angular_channels({2});
}

void UnicycleModel::state_derivative(const float* x, const float* u, float* dx) const {
  dx[0] = u[0] * std::cos(x[2]);
  dx[1] = u[0] * std::sin(x[2]);
  dx[2] = u[1];
}

CartpoleModel::CartpoleModel(CartpoleParams params)
    : DynamicsModel(ModelDims(4, 1, 4), "cartpole", {"X", "X_DOT", "THETA", "THETA_DOT"}),
      params_(params) {
  if (!(params_.cart_mass > 0.0f) || !(params_.pole_mass > 0.0f) ||
      !(params_.pole_length > 0.0f)) {
    throw Error("cartpole: masses and pole length must be > 0");
  }
  set_angular_channels({2});
}

void CartpoleModel::state_derivative(const float* x, const float* u, float* dx) const {
  const float sin_t = std::sin(x[2]);
  const float cos_t = std::cos(x[2]);
  const float omega = x[3];
  const float denom = params_.cart_mass + params_.pole_mass * sin_t * sin_t;
  const float x_acc =
      (u[0] + params_.pole_mass * sin_t * (params_.pole_length * omega * omega +
                                           params_.gravity * cos_t)) /
      denom;
  dx[0] = x[1];
  dx[1] = x_acc;
  dx[2] = omega;
  dx[3] = -(x_acc * cos_t + params_.gravity * sin_t) / params_.pole_length;
}

DiffDriveModel::DiffDriveModel(DiffDriveParams params)
    : DynamicsModel(ModelDims(3, 2, 3), "diff_drive", {"X", "Y", "YAW"}), params_(params) {
  if (!(params_.wheel_radius > 0.0f) || !(params_.wheel_length > 0.0f)) {
    throw Error("diff_drive: wheel geometry must be > 0");
  }
  set_angular_channels({2});
  set_control_bounds({params_.v_min, params_.w_min}, {params_.v_max, params_.w_max});
}

void DiffDriveModel::state_derivative(const float* x, const float* u, float* dx) const {
  dx[0] = u[0] * std::cos(x[2]);
  dx[1] = u[0] * std::sin(x[2]);
  dx[2] = u[1];
}

DoubleIntegrator2DModel::DoubleIntegrator2DModel()
    : DynamicsModel(ModelDims(4, 2, 4), "double_integrator", {"X", "Y", "V_X", "V_Y"}) {}

void DoubleIntegrator2DModel::state_derivative(const float* x, const float* u, float* dx) const {
  dx[0] = x[2];
  dx[1] = x[3];
  dx[2] = u[0];
  dx[3] = u[1];
}

std::unique_ptr<DynamicsModel> make_dynamics(const DynamicsSection& section) {
  if (section.kind == "unicycle") return std::make_unique<UnicycleModel>();
  if (section.kind == "cartpole") {
    CartpoleParams p;
    p.cart_mass = static_cast<float>(section.cart_mass);
    p.pole_mass = static_cast<float>(section.pole_mass);
    p.pole_length = static_cast<float>(section.pole_length);
    p.gravity = static_cast<float>(section.gravity);
    return std::make_unique<CartpoleModel>(p);
  }
  if (section.kind == "diff_drive") {
    DiffDriveParams p;
    p.wheel_radius = static_cast<float>(section.wheel_radius);
    p.wheel_length = static_cast<float>(section.wheel_length);
    p.v_min = static_cast<float>(section.v_min);
    p.v_max = static_cast<float>(section.v_max);
    p.w_min = static_cast<float>(section.w_min);
    p.w_max = static_cast<float>(section.w_max);
    return std::make_unique<DiffDriveModel>(p);
  }
  if (section.kind == "double_integrator") return std::make_unique<DoubleIntegrator2DModel>();
  throw ConfigError("dynamics.kind '" + section.kind + "' is not recognized");
}

}  // namespace smpc
