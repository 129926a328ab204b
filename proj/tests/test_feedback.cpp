#include "doctest.h"
#include "smpc/feedback.hpp"

#include <cmath>

using namespace smpc;

namespace {

PidGains scalar_gains(float kp, float ki, float kd, float dt) {
  PidGains gains;
  gains.kp = GainMatrix::Constant(1, 1, kp);
  gains.ki = GainMatrix::Constant(1, 1, ki);
  gains.kd = GainMatrix::Constant(1, 1, kd);
  gains.dt = dt;
  return gains;
}

}  // namespace

TEST_SUITE_BEGIN("feedback");

TEST_CASE("integral accumulates before the output forms") {
  const PidController pid(scalar_gains(0.0f, 1.0f, 0.0f, 0.1f));
  PidState state = pid.make_state();
  const StateVector x{0.0f};
  const StateVector ref{1.0f};
  CHECK(pid.feedback(x, ref, state)[0] == doctest::Approx(0.1f));
  CHECK(pid.feedback(x, ref, state)[0] == doctest::Approx(0.2f));
  CHECK(pid.feedback(x, ref, state)[0] == doctest::Approx(0.3f));
}

TEST_CASE("proportional term is linear in the error") {
  const PidController pid(scalar_gains(2.5f, 0.0f, 0.0f, 0.02f));
  PidState state = pid.make_state();
  CHECK(pid.feedback(StateVector{1.0f}, StateVector{3.0f}, state)[0] == doctest::Approx(5.0f));
  CHECK(pid.feedback(StateVector{4.0f}, StateVector{3.0f}, state)[0] == doctest::Approx(-2.5f));
}

TEST_CASE("derivative is zero on the first call") {
  const PidController pid(scalar_gains(0.0f, 0.0f, 1.0f, 0.1f));
  PidState state = pid.make_state();
  CHECK(pid.feedback(StateVector{0.0f}, StateVector{5.0f}, state)[0] == 0.0f);
  // Error goes 5 -> 2: derivative (2 - 5) / 0.1 = -30.
  CHECK(pid.feedback(StateVector{3.0f}, StateVector{5.0f}, state)[0] == doctest::Approx(-30.0f));
  // Constant error: derivative returns to zero.
  CHECK(pid.feedback(StateVector{3.0f}, StateVector{5.0f}, state)[0] == doctest::Approx(0.0f));
}

TEST_CASE("reset clears history") {
  const PidController pid(scalar_gains(0.0f, 1.0f, 1.0f, 0.1f));
  PidState state = pid.make_state();
  (void)pid.feedback(StateVector{0.0f}, StateVector{1.0f}, state);
  (void)pid.feedback(StateVector{0.0f}, StateVector{2.0f}, state);
  state.reset();
  CHECK_FALSE(state.has_prev);
  CHECK(pid.feedback(StateVector{0.0f}, StateVector{1.0f}, state)[0] == doctest::Approx(0.1f));
}

TEST_CASE("integral clamps at the configured limit") {
  PidGains gains = scalar_gains(0.0f, 1.0f, 0.0f, 1.0f);
  gains.integral_limit = 2.5f;
  const PidController pid(gains);
  PidState state = pid.make_state();
  const StateVector x{0.0f};
  const StateVector ref{2.0f};
  CHECK(pid.feedback(x, ref, state)[0] == doctest::Approx(2.0f));
  CHECK(pid.feedback(x, ref, state)[0] == doctest::Approx(2.5f));
  CHECK(pid.feedback(x, ref, state)[0] == doctest::Approx(2.5f));
  // The clamp is symmetric.
  const StateVector neg_ref{-2.0f};
  PidState fresh = pid.make_state();
  (void)pid.feedback(x, neg_ref, fresh);
  CHECK(pid.feedback(x, neg_ref, fresh)[0] == doctest::Approx(-2.5f));
}

TEST_CASE("matrix gains mix state channels") {
  PidGains gains;
  gains.kp = GainMatrix(1, 2);
  gains.kp << 1.0f, -2.0f;
  gains.ki = GainMatrix::Zero(1, 2);
  gains.kd = GainMatrix::Zero(1, 2);
  const PidController pid(gains);
  PidState state = pid.make_state();
  const ControlVector u = pid.feedback(StateVector{0.0f, 0.0f}, StateVector{1.0f, 1.0f}, state);
  CHECK(u.dim() == 1);
  CHECK(u[0] == doctest::Approx(1.0f - 2.0f));
}

TEST_CASE("gain validation") {
  PidGains gains = scalar_gains(1.0f, 0.0f, 0.0f, 0.02f);
  gains.ki = GainMatrix::Constant(1, 2, 0.0f);  // mismatched shape
  CHECK_THROWS_AS(PidController{gains}, Error);

  gains = scalar_gains(std::nanf(""), 0.0f, 0.0f, 0.02f);
  CHECK_THROWS_AS(PidController{gains}, Error);

  gains = scalar_gains(1.0f, 0.0f, 0.0f, 0.0f);
  CHECK_THROWS_AS(PidController{gains}, Error);
}

TEST_CASE("scheduled gain computation is a deliberate no-op") {
  PidController pid(scalar_gains(1.0f, 2.0f, 3.0f, 0.02f));
  const PidGains before = pid.gains();
  pid.compute_feedback_gains({StateVector{0.0f}, StateVector{1.0f}});
  CHECK(pid.gains().kp(0, 0) == before.kp(0, 0));
  CHECK(pid.gains().ki(0, 0) == before.ki(0, 0));
  CHECK(pid.gains().kd(0, 0) == before.kd(0, 0));
}

TEST_CASE("gains assemble from config sections") {
  FeedbackSection section;
  section.kind = "pid";
  section.kp = {{1.0, 2.0, 3.0}};
  const PidGains gains = make_pid_gains(section, 1, 3, 0.05f);
  CHECK(gains.kp.rows() == 1);
  CHECK(gains.kp.cols() == 3);
  CHECK(gains.kp(0, 1) == 2.0f);
  CHECK(gains.ki.isZero());
  CHECK(gains.kd.isZero());
  CHECK(gains.dt == 0.05f);

  section.kp = {{1.0, 2.0}};
  CHECK_THROWS_AS(make_pid_gains(section, 1, 3, 0.05f), ConfigError);

  section.kp = {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
  CHECK_THROWS_AS(make_pid_gains(section, 1, 3, 0.05f), ConfigError);
}

TEST_SUITE_END();
