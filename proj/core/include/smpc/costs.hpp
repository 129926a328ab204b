#pragma once

#include <memory>
#include <string>

#include "smpc/costmap.hpp"
#include "smpc/dynamics.hpp"
#include "smpc/scenario.hpp"
#include "smpc/types.hpp"

namespace smpc {

/// Stage and terminal cost over model outputs. Raw entry points are the
/// rollout hot path; typed overloads validate dimensions and the
/// finite/non-negative contract.
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  const std::string& name() const { return name_; }
  int output_dim() const { return n_y_; }
  int control_dim() const { return n_u_; }

  virtual double running_cost_raw(const float* y, const float* u, int t) const = 0;
  virtual double terminal_cost_raw(const float* y) const = 0;

  double running_cost(const OutputVector& y, const ControlVector& u, int t) const;
  double terminal_cost(const OutputVector& y) const;

 protected:
  CostFunction(std::string name, int n_y, int n_u) : name_(std::move(name)), n_y_(n_y), n_u_(n_u) {}

 private:
  std::string name_;
  int n_y_;
  int n_u_;
};

struct RoadCostParams {
  float half_width = 1.0f;
  float linear_coeff = 1.0f;
  float quadratic_coeff = 10.0f;
};

/// Penalizes lateral offset from the road centerline (output channel 1):
/// linear inside the half-width, linear-plus-quadratic beyond it. The two
/// branches agree at the boundary, so the cost is continuous.
class RoadCost : public CostFunction {
 public:
  RoadCost(RoadCostParams params, int n_y, int n_u);
  double running_cost_raw(const float* y, const float* u, int t) const override;
  double terminal_cost_raw(const float* y) const override;

 private:
  RoadCostParams params_;
};

struct CircleTrackCostParams {
  float inner_radius = 1.875f;
  float outer_radius = 2.125f;
  float crash_cost = 1000.0f;
  float speed_target = 2.0f;
  float speed_coeff = 2.0f;
  float angular_momentum_target = 4.0f;
  float angular_momentum_coeff = 2.0f;
};

/// Keeps a planar point mass on an annular track at a target speed and
/// angular momentum. Outputs are (x, y, v_x, v_y). Both annulus boundaries
/// are inclusive for the crash penalty.
class CircleTrackCost : public CostFunction {
 public:
  explicit CircleTrackCost(CircleTrackCostParams params = {});
  double running_cost_raw(const float* y, const float* u, int t) const override;
  double terminal_cost_raw(const float* y) const override;

 private:
  CircleTrackCostParams params_;
  float inner_sq_;
  float outer_sq_;
};

struct DiffDriveNavCostParams {
  float goal_x = 2.0f;
  float goal_y = 2.0f;
  float goal_yaw = 0.0f;
  float dist_coeff = 5.0f;
  float yaw_coeff = 5.0f;
  float obstacle_cost = 20.0f;
};

/// Goal-seeking cost for planar pose outputs (x, y, yaw) with a per-step
/// occupancy penalty from a costmap.
class DiffDriveNavCost : public CostFunction {
 public:
  DiffDriveNavCost(DiffDriveNavCostParams params, std::shared_ptr<const Costmap2D> map);
  double running_cost_raw(const float* y, const float* u, int t) const override;
  double terminal_cost_raw(const float* y) const override;

  const Costmap2D& map() const { return *map_; }

 private:
  DiffDriveNavCostParams params_;
  std::shared_ptr<const Costmap2D> map_;
};

/// Weighted squared offset from a target output; the terminal cost uses the
/// same formula.
class QuadraticCost : public CostFunction {
 public:
  QuadraticCost(std::vector<float> target, std::vector<float> weights, int n_u);
  double running_cost_raw(const float* y, const float* u, int t) const override;
  double terminal_cost_raw(const float* y) const override;

 private:
  std::vector<float> target_;
  std::vector<float> weights_;
};

/// Builds the configured cost and checks it against the model's output and
/// control dimensions. For the navigation cost, loads the costmap from
/// cost.costmap_path or builds an all-free map of the configured size.
std::unique_ptr<CostFunction> make_cost(const CostSection& section, const DynamicsModel& model);

}  // namespace smpc
