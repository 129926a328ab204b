#include "smpc/feedback.hpp"

#include <algorithm>
#include <cmath>

namespace smpc {

PidController::PidController(PidGains gains) : gains_(std::move(gains)) {
  const auto rows = gains_.kp.rows();
  const auto cols = gains_.kp.cols();
  if (rows < 1 || cols < 1) throw Error("pid: gain matrices must be non-empty");
  for (const GainMatrix* g : {&gains_.ki, &gains_.kd}) {
    if (g->rows() != rows || g->cols() != cols) {
      throw Error("pid: kp, ki, kd must share one shape");
    }
  }
  if (!gains_.kp.allFinite() || !gains_.ki.allFinite() || !gains_.kd.allFinite()) {
    throw Error("pid: gain matrices must be finite");
  }
  if (!(gains_.dt > 0.0f)) throw Error("pid: dt must be > 0");
  if (!(gains_.integral_limit > 0.0f)) throw Error("pid: integral_limit must be > 0");
}

PidState PidController::make_state() const {
  PidState state;
  state.integral = Vec::Zero(gains_.kp.cols());
  state.prev_error = Vec::Zero(gains_.kp.cols());
  return state;
}

ControlVector PidController::feedback(const StateVector& x, const StateVector& x_ref,
                                      PidState& state) const {
  const auto n_x = gains_.kp.cols();
  if (x.dim() != n_x || x_ref.dim() != n_x) {
    throw Error("pid: state dimension does not match the gain matrices");
  }
  if (state.integral.size() != n_x) {
    state.integral = Vec::Zero(n_x);
    state.prev_error = Vec::Zero(n_x);
    state.has_prev = false;
  }

  const Vec error = x_ref.vec() - x.vec();
  state.integral += error * gains_.dt;
  if (std::isfinite(gains_.integral_limit)) {
    state.integral = state.integral.cwiseMax(-gains_.integral_limit).cwiseMin(gains_.integral_limit);
  }
  Vec u = gains_.kp * error + gains_.ki * state.integral;
  if (state.has_prev) {
    u += gains_.kd * ((error - state.prev_error) / gains_.dt);
  }
  state.prev_error = error;
  state.has_prev = true;
  return ControlVector(std::move(u));
}

void PidController::compute_feedback_gains(const std::vector<StateVector>& /*trajectory*/) {}

PidGains make_pid_gains(const FeedbackSection& section, int n_u, int n_x, float dt) {
  auto fill = [&](const std::vector<std::vector<double>>& rows, const char* label) {
    GainMatrix g = GainMatrix::Zero(n_u, n_x);
    if (rows.empty()) return g;
    if (static_cast<int>(rows.size()) != n_u) {
      throw ConfigError(std::string("feedback.") + label + " needs one row per control channel");
    }
    for (int r = 0; r < n_u; ++r) {
      if (static_cast<int>(rows[static_cast<size_t>(r)].size()) != n_x) {
        throw ConfigError(std::string("feedback.") + label +
                          " rows need one entry per state channel");
      }
      for (int c = 0; c < n_x; ++c) {
        g(r, c) = static_cast<float>(rows[static_cast<size_t>(r)][static_cast<size_t>(c)]);
      }
    }
    return g;
  };

  PidGains gains;
  gains.kp = fill(section.kp, "kp");
  gains.ki = fill(section.ki, "ki");
  gains.kd = fill(section.kd, "kd");
  gains.dt = dt;
  gains.integral_limit = static_cast<float>(section.integral_limit);
  return gains;
}

}  // namespace smpc
