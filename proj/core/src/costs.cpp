#include "smpc/costs.hpp"

#include <cmath>

namespace smpc {

double CostFunction::running_cost(const OutputVector& y, const ControlVector& u, int t) const {
  if (y.dim() != n_y_ || u.dim() != n_u_) {
    throw Error(name_ + ": running_cost dimension mismatch");
  }
  const double c = running_cost_raw(y.data(), u.data(), t);
  if (!std::isfinite(c) || c < 0.0) {
    throw Error(name_ + ": running cost must be finite and >= 0");
  }
  return c;
}

double CostFunction::terminal_cost(const OutputVector& y) const {
  if (y.dim() != n_y_) throw Error(name_ + ": terminal_cost dimension mismatch");
  const double c = terminal_cost_raw(y.data());
  if (!std::isfinite(c) || c < 0.0) {
    throw Error(name_ + ": terminal cost must be finite and >= 0");
  }
  return c;
}

RoadCost::RoadCost(RoadCostParams params, int n_y, int n_u)
    : CostFunction("road", n_y, n_u), params_(params) {
  if (n_y < 2) throw Error("road cost needs at least 2 output channels");
  if (!(params_.half_width > 0.0f)) throw Error("road cost: half_width must be > 0");
}

double RoadCost::running_cost_raw(const float* y, const float* /*u*/, int /*t*/) const {
  const float offset = std::fabs(y[1]);
  if (offset <= params_.half_width) {
    return static_cast<double>(params_.linear_coeff) * offset;
  }
  const float excess = offset - params_.half_width;
  return static_cast<double>(params_.linear_coeff) * params_.half_width +
         static_cast<double>(params_.quadratic_coeff) * excess * excess;
}

double RoadCost::terminal_cost_raw(const float* /*y*/) const { return 0.0; }

CircleTrackCost::CircleTrackCost(CircleTrackCostParams params)
    : CostFunction("circle_track", 4, 2), params_(params) {
  if (!(params_.inner_radius > 0.0f) || !(params_.inner_radius < params_.outer_radius)) {
    throw Error("circle_track cost: need 0 < inner_radius < outer_radius");
  }
  inner_sq_ = params_.inner_radius * params_.inner_radius;
  outer_sq_ = params_.outer_radius * params_.outer_radius;
}

double CircleTrackCost::running_cost_raw(const float* y, const float* /*u*/, int /*t*/) const {
  const float r_sq = y[0] * y[0] + y[1] * y[1];
  double cost = 0.0;
  if (r_sq <= inner_sq_) cost += params_.crash_cost;
  if (r_sq >= outer_sq_) cost += params_.crash_cost;
  const float speed = std::sqrt(y[2] * y[2] + y[3] * y[3]);
  cost += static_cast<double>(params_.speed_coeff) * std::fabs(params_.speed_target - speed);
  const float angular_momentum = y[0] * y[3] - y[1] * y[2];
  cost += static_cast<double>(params_.angular_momentum_coeff) *
          std::fabs(params_.angular_momentum_target - angular_momentum);
  return cost;
}

double CircleTrackCost::terminal_cost_raw(const float* /*y*/) const { return 0.0; }

DiffDriveNavCost::DiffDriveNavCost(DiffDriveNavCostParams params,
                                   std::shared_ptr<const Costmap2D> map)
    : CostFunction("diff_drive_nav", 3, 2), params_(params), map_(std::move(map)) {
  if (!map_) throw Error("diff_drive_nav cost: costmap is required");
}

double DiffDriveNavCost::running_cost_raw(const float* y, const float* /*u*/, int /*t*/) const {
  const float dx = y[0] - params_.goal_x;
  const float dy = y[1] - params_.goal_y;
  const float dyaw = wrap_angle(y[2] - params_.goal_yaw);
  return static_cast<double>(params_.dist_coeff) * (dx * dx + dy * dy) +
         static_cast<double>(params_.yaw_coeff) * dyaw * dyaw +
         static_cast<double>(params_.obstacle_cost) * map_->occupancy(y[0], y[1]);
}

double DiffDriveNavCost::terminal_cost_raw(const float* /*y*/) const { return 0.0; }

QuadraticCost::QuadraticCost(std::vector<float> target, std::vector<float> weights, int n_u)
    : CostFunction("quadratic", static_cast<int>(weights.size()), n_u),
      target_(std::move(target)),
      weights_(std::move(weights)) {
  if (target_.size() != weights_.size() || weights_.empty()) {
    throw Error("quadratic cost: target and weights must be non-empty and equal length");
  }
  for (float w : weights_) {
    if (!(w >= 0.0f)) throw Error("quadratic cost: weights must be >= 0");
  }
}

double QuadraticCost::running_cost_raw(const float* y, const float* /*u*/, int /*t*/) const {
  double cost = 0.0;
  for (size_t i = 0; i < weights_.size(); ++i) {
    const double d = static_cast<double>(y[i]) - target_[i];
    cost += weights_[i] * d * d;
  }
  return cost;
}

double QuadraticCost::terminal_cost_raw(const float* y) const {
  return running_cost_raw(y, nullptr, 0);
}

std::unique_ptr<CostFunction> make_cost(const CostSection& section, const DynamicsModel& model) {
  const ModelDims& dims = model.dims();
  std::unique_ptr<CostFunction> cost;
  if (section.kind == "road") {
    RoadCostParams p;
    p.half_width = static_cast<float>(section.road_half_width);
    p.linear_coeff = static_cast<float>(section.road_linear_coeff);
    p.quadratic_coeff = static_cast<float>(section.road_quadratic_coeff);
    cost = std::make_unique<RoadCost>(p, dims.n_y, dims.n_u);
  } else if (section.kind == "circle_track") {
    CircleTrackCostParams p;
    p.inner_radius = static_cast<float>(section.inner_radius);
    p.outer_radius = static_cast<float>(section.outer_radius);
    p.crash_cost = static_cast<float>(section.crash_cost);
    p.speed_target = static_cast<float>(section.speed_target);
    p.speed_coeff = static_cast<float>(section.speed_coeff);
    p.angular_momentum_target = static_cast<float>(section.angular_momentum_target);
    p.angular_momentum_coeff = static_cast<float>(section.angular_momentum_coeff);
    cost = std::make_unique<CircleTrackCost>(p);
  } else if (section.kind == "diff_drive_nav") {
    DiffDriveNavCostParams p;
    p.goal_x = static_cast<float>(section.goal_x);
    p.goal_y = static_cast<float>(section.goal_y);
    p.goal_yaw = static_cast<float>(section.goal_yaw);
    p.dist_coeff = static_cast<float>(section.dist_coeff);
    p.yaw_coeff = static_cast<float>(section.yaw_coeff);
    p.obstacle_cost = static_cast<float>(section.obstacle_cost);
    std::shared_ptr<const Costmap2D> map;
    if (!section.costmap_path.empty()) {
      map = std::make_shared<Costmap2D>(Costmap2D::load(section.costmap_path));
    } else {
      map = std::make_shared<Costmap2D>(section.map_width, section.map_height,
                                        section.map_resolution, section.map_origin_x,
                                        section.map_origin_y);
    }
    cost = std::make_unique<DiffDriveNavCost>(p, std::move(map));
  } else if (section.kind == "quadratic") {
    std::vector<float> target(section.target.begin(), section.target.end());
    std::vector<float> weights(section.weights.begin(), section.weights.end());
    if (target.empty()) target.assign(weights.size(), 0.0f);
    cost = std::make_unique<QuadraticCost>(std::move(target), std::move(weights), dims.n_u);
  } else {
    throw ConfigError("cost.kind '" + section.kind + "' is not recognized");
  }

  if (cost->output_dim() != dims.n_y) {
    throw ConfigError("cost '" + cost->name() + "' expects " +
                      std::to_string(cost->output_dim()) + " output channels but model '" +
                      model.name() + "' produces " + std::to_string(dims.n_y));
  }
  return cost;
}

}  // namespace smpc
