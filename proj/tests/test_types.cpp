#include "doctest.h"
#include "smpc/types.hpp"

#include <cmath>
#include <stdexcept>

using namespace smpc;

TEST_SUITE_BEGIN("types");

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  constexpr float pi = 3.14159265358979f;
  CHECK(wrap_angle(0.0f) == 0.0f);
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  // -pi is excluded from the interval; it lands on +pi.
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(2.0f * pi) == doctest::Approx(0.0f).epsilon(1e-6));
  CHECK(wrap_angle(3.0f * pi) == doctest::Approx(pi).epsilon(1e-5));
  CHECK(wrap_angle(-1.5f * pi) == doctest::Approx(0.5f * pi));
  for (float a = -20.0f; a <= 20.0f; a += 0.37f) {
    const float w = wrap_angle(a);
    CHECK(w > -pi - 1e-5f);
    CHECK(w <= pi + 1e-5f);
    // Same point on the circle.
    CHECK(std::remainder(w - a, 2.0f * pi) == doctest::Approx(0.0f).epsilon(1e-4));
  }
}

TEST_CASE("ModelDims validates bounds") {
  CHECK_NOTHROW(ModelDims(1, 1, 1));
  CHECK_NOTHROW(ModelDims(8, 8, 8));
  CHECK_THROWS_AS(ModelDims(0, 1, 1), Error);
  CHECK_THROWS_AS(ModelDims(3, -1, 3), Error);
  CHECK_THROWS_AS(ModelDims(9, 2, 3), Error);
}

TEST_CASE("typed vectors reject non-finite entries and name the channel") {
  Vec v(3);
  v << 1.0f, std::nanf(""), 3.0f;
  CHECK_THROWS_WITH_AS(StateVector{v}, doctest::Contains("state"), Error);
  CHECK_THROWS_WITH_AS(StateVector{v}, doctest::Contains("channel 1"), Error);
  v[1] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(ControlVector{v}, Error);
}

TEST_CASE("typed vector basics") {
  const StateVector x{1.0f, -2.0f, 3.5f};
  CHECK(x.dim() == 3);
  CHECK(x[0] == 1.0f);
  CHECK(x[2] == 3.5f);
  CHECK(x == StateVector{1.0f, -2.0f, 3.5f});
  CHECK_FALSE(x == StateVector{1.0f, -2.0f});
  CHECK(StateVector::zeros(4)[3] == 0.0f);
  CHECK(x.data()[1] == -2.0f);
}

TEST_CASE("control trajectory invariants") {
  CHECK_THROWS_AS(ControlTrajectory(0.02, {}), Error);
  CHECK_THROWS_AS(ControlTrajectory(0.0, {ControlVector{1.0f}}), Error);
  CHECK_THROWS_AS(ControlTrajectory(-0.1, {ControlVector{1.0f}}), Error);
  CHECK_THROWS_AS(ControlTrajectory(0.02, {ControlVector{1.0f}, ControlVector{1.0f, 2.0f}}),
                  Error);

  const ControlTrajectory traj = ControlTrajectory::zeros(5, 0.1, 2);
  CHECK(traj.horizon() == 5);
  CHECK(traj.dt() == 0.1);
  CHECK(traj.control_dim() == 2);
  CHECK(traj.at(4) == ControlVector::zeros(2));
  CHECK_THROWS_AS((void)traj.at(5), std::out_of_range);

  const ControlTrajectory a(0.02, {ControlVector{1.0f, 2.0f}, ControlVector{3.0f, 4.0f}});
  const ControlTrajectory b(0.02, {ControlVector{1.0f, 2.0f}, ControlVector{3.0f, 4.0f}});
  CHECK(a == b);
  CHECK_FALSE(a == traj);
}

TEST_SUITE_END();
