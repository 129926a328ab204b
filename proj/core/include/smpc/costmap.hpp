#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smpc/types.hpp"

namespace smpc {

/// Binary occupancy grid over a world-frame rectangle. Cells are half-open
/// squares of side `resolution`; queries outside the map read as occupied.
class Costmap2D {
 public:
  Costmap2D(double width_m, double height_m, double resolution, double origin_x,
            double origin_y);

  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  double width_m() const { return width_m_; }
  double height_m() const { return height_m_; }
  double resolution() const { return resolution_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }

  bool cell(int ix, int iy) const;
  void set_cell(int ix, int iy, bool occupied);

  /// Marks every cell whose center lies in [x0, x1] x [y0, y1].
  void fill_rect(double x0, double y0, double x1, double y1, bool occupied);

  /// World-frame lookup: 1 if (x, y) falls in an occupied or out-of-map
  /// cell, else 0.
  float occupancy(float x, float y) const {
    const float fx = (x - static_cast<float>(origin_x_)) * inv_resolution_;
    const float fy = (y - static_cast<float>(origin_y_)) * inv_resolution_;
    const int ix = static_cast<int>(std::floor(fx));
    const int iy = static_cast<int>(std::floor(fy));
    if (ix < 0 || iy < 0 || ix >= cells_x_ || iy >= cells_y_) return 1.0f;
    return grid_[static_cast<size_t>(iy) * cells_x_ + ix] ? 1.0f : 0.0f;
  }

  /// Reads the text format: four header lines (width_m, height_m,
  /// resolution, origin) then cells_y rows of cells_x space-separated 0/1
  /// values, row 0 at the lowest y.
  static Costmap2D load(const std::string& path);
  void save(const std::string& path) const;

 private:
  double width_m_;
  double height_m_;
  double resolution_;
  double origin_x_;
  double origin_y_;
  float inv_resolution_;
  int cells_x_;
  int cells_y_;
  std::vector<uint8_t> grid_;
};

}  // namespace smpc
