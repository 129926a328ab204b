#include "doctest.h"
#include "smpc/costs.hpp"
#include "smpc/costmap.hpp"
#include "smpc/dynamics.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using namespace smpc;

namespace {

// Minimal cost stub for exercising the checked wrappers.
class BrokenCost : public CostFunction {
 public:
  explicit BrokenCost(double value) : CostFunction("broken", 2, 1), value_(value) {}
  double running_cost_raw(const float*, const float*, int) const override { return value_; }
  double terminal_cost_raw(const float*) const override { return value_; }

 private:
  double value_;
};

}  // namespace

TEST_SUITE_BEGIN("costs");

TEST_CASE("costmap geometry and cell access") {
  Costmap2D map(2.0, 1.0, 0.5, -1.0, 0.0);
  CHECK(map.cells_x() == 4);
  CHECK(map.cells_y() == 2);
  CHECK(map.occupancy(0.1f, 0.1f) == 0.0f);

  map.set_cell(2, 0, true);
  CHECK(map.cell(2, 0));
  // Cell (2, 0) spans x in [0, 0.5), y in [0, 0.5).
  CHECK(map.occupancy(0.1f, 0.1f) == 1.0f);
  CHECK(map.occupancy(0.1f, 0.6f) == 0.0f);
  CHECK(map.occupancy(-0.1f, 0.1f) == 0.0f);

  CHECK_THROWS_AS(map.set_cell(4, 0, true), Error);
  CHECK_THROWS_AS((void)map.cell(0, -1), Error);
}

TEST_CASE("outside the map reads as occupied") {
  const Costmap2D map(1.0, 1.0, 0.1, 0.0, 0.0);
  CHECK(map.occupancy(0.5f, 0.5f) == 0.0f);
  CHECK(map.occupancy(-0.01f, 0.5f) == 1.0f);
  CHECK(map.occupancy(0.5f, 1.01f) == 1.0f);
  CHECK(map.occupancy(5.0f, 5.0f) == 1.0f);
}

TEST_CASE("fill_rect marks cells whose centers fall in the rectangle") {
  Costmap2D map(1.0, 1.0, 0.1, 0.0, 0.0);
  map.fill_rect(0.21, 0.21, 0.59, 0.39, true);
  // Centers at 0.25, 0.35, 0.45, 0.55 in x; 0.25, 0.35 in y.
  int occupied = 0;
  for (int iy = 0; iy < map.cells_y(); ++iy) {
    for (int ix = 0; ix < map.cells_x(); ++ix) {
      if (map.cell(ix, iy)) ++occupied;
    }
  }
  CHECK(occupied == 8);
  CHECK(map.cell(2, 2));
  CHECK(map.cell(5, 3));
  CHECK_FALSE(map.cell(1, 2));
}

TEST_CASE("costmap file round trip") {
  Costmap2D map(1.0, 0.6, 0.2, -0.5, 0.3);
  map.set_cell(0, 0, true);
  map.set_cell(4, 2, true);
  const std::string path = "/tmp/smpc_test_costmap.txt";
  map.save(path);

  const Costmap2D loaded = Costmap2D::load(path);
  CHECK(loaded.cells_x() == map.cells_x());
  CHECK(loaded.cells_y() == map.cells_y());
  CHECK(loaded.resolution() == map.resolution());
  CHECK(loaded.origin_x() == map.origin_x());
  CHECK(loaded.origin_y() == map.origin_y());
  for (int iy = 0; iy < map.cells_y(); ++iy) {
    for (int ix = 0; ix < map.cells_x(); ++ix) {
      CHECK(loaded.cell(ix, iy) == map.cell(ix, iy));
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("costmap load errors name the file and line") {
  const std::string path = "/tmp/smpc_test_costmap_bad.txt";
  std::ofstream out(path);
  out << "width_m 1\nheight_m 1\nresolution 0.5\norigin 0 0\n1 0\n1\n";
  out.close();
  CHECK_THROWS_WITH_AS(Costmap2D::load(path), doctest::Contains(path.c_str()), Error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(Costmap2D::load("/nonexistent/map.txt"), Error);
}

TEST_CASE("circle track cost frozen values") {
  const CircleTrackCost cost;
  const float u[2] = {0.0f, 0.0f};

  // On the centerline radius at the target speed and angular momentum.
  const float on_track[4] = {2.0f, 0.0f, 0.0f, 2.0f};
  CHECK(cost.running_cost_raw(on_track, u, 0) == doctest::Approx(0.0));

  // At the origin: crashed (inside the annulus), zero speed, zero momentum.
  const float at_origin[4] = {0.0f, 0.0f, 0.0f, 0.0f};
  CHECK(cost.running_cost_raw(at_origin, u, 0) == doctest::Approx(1012.0));

  CHECK(cost.terminal_cost_raw(on_track) == 0.0);
}

TEST_CASE("circle track boundaries are inclusive") {
  const CircleTrackCost cost;
  const float u[2] = {0.0f, 0.0f};
  const float inner[4] = {1.875f, 0.0f, 0.0f, 2.0f};
  const float outer[4] = {2.125f, 0.0f, 0.0f, 2.0f};
  const float inside[4] = {2.0f, 0.0f, 0.0f, 2.0f};
  CHECK(cost.running_cost_raw(inner, u, 0) >= 1000.0);
  CHECK(cost.running_cost_raw(outer, u, 0) >= 1000.0);
  CHECK(cost.running_cost_raw(inside, u, 0) < 1000.0);
}

TEST_CASE("road cost is continuous at the boundary") {
  const RoadCost cost(RoadCostParams{1.0f, 1.0f, 10.0f}, 3, 2);
  const float u[2] = {0.0f, 0.0f};

  const float inside[3] = {0.0f, 0.5f, 0.0f};
  CHECK(cost.running_cost_raw(inside, u, 0) == doctest::Approx(0.5));

  const float outside[3] = {0.0f, 2.0f, 0.0f};
  CHECK(cost.running_cost_raw(outside, u, 0) == doctest::Approx(1.0 + 10.0));

  const float at_edge[3] = {0.0f, 1.0f, 0.0f};
  const float just_out[3] = {0.0f, 1.0001f, 0.0f};
  CHECK(cost.running_cost_raw(just_out, u, 0) ==
        doctest::Approx(cost.running_cost_raw(at_edge, u, 0)).epsilon(1e-3));

  // Symmetric in the offset sign.
  const float mirrored[3] = {0.0f, -2.0f, 0.0f};
  CHECK(cost.running_cost_raw(mirrored, u, 0) == cost.running_cost_raw(outside, u, 0));
  CHECK(cost.terminal_cost_raw(outside) == 0.0);
}

TEST_CASE("navigation cost adds the occupancy penalty") {
  auto map = std::make_shared<Costmap2D>(4.0, 4.0, 0.5, -2.0, -2.0);
  map->fill_rect(0.9, 0.9, 1.4, 1.4, true);
  DiffDriveNavCostParams params;
  const DiffDriveNavCost cost(params, map);
  const float u[2] = {0.0f, 0.0f};

  const float free_pose[3] = {0.0f, 0.0f, 0.0f};
  const double base = cost.running_cost_raw(free_pose, u, 0);
  CHECK(base == doctest::Approx(5.0 * (4.0 + 4.0)));

  const float blocked_pose[3] = {1.0f, 1.0f, 0.0f};
  const double blocked = cost.running_cost_raw(blocked_pose, u, 0);
  CHECK(blocked == doctest::Approx(5.0 * (1.0 + 1.0) + 20.0));

  // Yaw error wraps: a yaw of 2*pi is on target.
  const float spun[3] = {0.0f, 0.0f, 6.2831853f};
  CHECK(cost.running_cost_raw(spun, u, 0) == doctest::Approx(base).epsilon(1e-5));
  CHECK(cost.terminal_cost_raw(blocked_pose) == 0.0);
}

TEST_CASE("quadratic cost and its terminal form coincide") {
  const QuadraticCost cost({1.0f, -1.0f}, {2.0f, 0.5f}, 1);
  const float u[1] = {0.0f};
  const float y[2] = {2.0f, 1.0f};
  const double expected = 2.0 * 1.0 + 0.5 * 4.0;
  CHECK(cost.running_cost_raw(y, u, 0) == doctest::Approx(expected));
  CHECK(cost.terminal_cost_raw(y) == cost.running_cost_raw(y, u, 0));

  CHECK_THROWS_AS(QuadraticCost({1.0f}, {1.0f, 2.0f}, 1), Error);
  CHECK_THROWS_AS(QuadraticCost({1.0f}, {-1.0f}, 1), Error);
}

TEST_CASE("checked wrappers enforce the cost contract") {
  const BrokenCost negative(-1.0);
  const OutputVector y{0.0f, 0.0f};
  const ControlVector u{0.0f};
  CHECK_THROWS_AS(negative.running_cost(y, u, 0), Error);
  CHECK_THROWS_AS(negative.terminal_cost(y), Error);

  const BrokenCost nan_cost(std::nan(""));
  CHECK_THROWS_AS(nan_cost.running_cost(y, u, 0), Error);

  const BrokenCost fine(3.0);
  CHECK(fine.running_cost(y, u, 0) == 3.0);
  CHECK_THROWS_AS(fine.running_cost(OutputVector{0.0f}, u, 0), Error);
}

TEST_CASE("factory matches cost to model dimensions") {
  const DiffDriveModel dd;
  const DoubleIntegrator2DModel di;

  CostSection section;
  section.kind = "circle_track";
  CHECK(make_cost(section, di)->name() == "circle_track");
  CHECK_THROWS_AS(make_cost(section, dd), ConfigError);

  section.kind = "diff_drive_nav";
  CHECK(make_cost(section, dd)->name() == "diff_drive_nav");

  section.kind = "quadratic";
  section.weights = {1.0, 1.0, 1.0, 1.0};
  const auto quad = make_cost(section, di);
  CHECK(quad->output_dim() == 4);

  section.kind = "mystery";
  CHECK_THROWS_AS(make_cost(section, di), ConfigError);
}

TEST_SUITE_END();
