#pragma once

#include <limits>
#include <vector>

#include "smpc/scenario.hpp"
#include "smpc/types.hpp"

namespace smpc {

struct PidGains {
  // n_u x n_x gain matrices applied to the state error.
  GainMatrix kp;
  GainMatrix ki;
  GainMatrix kd;
  float dt = 0.02f;
  // Per-channel magnitude clamp on the error integral; infinite by default.
  float integral_limit = std::numeric_limits<float>::infinity();
};

struct PidState {
  Vec integral;
  Vec prev_error;
  bool has_prev = false;

  void reset() {
    integral.setZero();
    prev_error.setZero();
    has_prev = false;
  }
};

/// Trajectory-tracking PID on the full state error. The integral is updated
/// before the output is formed, and the derivative term is zero on the first
/// call after a reset.
class PidController {
 public:
  explicit PidController(PidGains gains);

  const PidGains& gains() const { return gains_; }
  /// Mutable access; updated gains apply from the next feedback call.
  PidGains& gains() { return gains_; }

  PidState make_state() const;
  ControlVector feedback(const StateVector& x, const StateVector& x_ref, PidState& state) const;

  /// Gains are fixed at construction; per-trajectory gain scheduling is
  /// intentionally a no-op.
  void compute_feedback_gains(const std::vector<StateVector>& trajectory);

 private:
  PidGains gains_;
};

/// Builds gains from a config section, zero-filling absent matrices.
PidGains make_pid_gains(const FeedbackSection& section, int n_u, int n_x, float dt);

}  // namespace smpc
