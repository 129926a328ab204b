#include "smpc/costmap.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace smpc {

Costmap2D::Costmap2D(double width_m, double height_m, double resolution, double origin_x,
                     double origin_y)
    : width_m_(width_m),
      height_m_(height_m),
      resolution_(resolution),
      origin_x_(origin_x),
      origin_y_(origin_y) {
  if (!(resolution_ > 0.0)) throw Error("costmap: resolution must be > 0");
  if (!(width_m_ > 0.0) || !(height_m_ > 0.0)) {
    throw Error("costmap: width_m and height_m must be > 0");
  }
  inv_resolution_ = static_cast<float>(1.0 / resolution_);
  cells_x_ = static_cast<int>(std::lround(width_m_ / resolution_));
  cells_y_ = static_cast<int>(std::lround(height_m_ / resolution_));
  if (cells_x_ < 1 || cells_y_ < 1) throw Error("costmap: dimensions give an empty grid");
  grid_.assign(static_cast<size_t>(cells_x_) * cells_y_, 0);
}

bool Costmap2D::cell(int ix, int iy) const {
  if (ix < 0 || iy < 0 || ix >= cells_x_ || iy >= cells_y_) {
    throw Error("costmap: cell index out of range");
  }
  return grid_[static_cast<size_t>(iy) * cells_x_ + ix] != 0;
}

void Costmap2D::set_cell(int ix, int iy, bool occupied) {
  if (ix < 0 || iy < 0 || ix >= cells_x_ || iy >= cells_y_) {
    throw Error("costmap: cell index out of range");
  }
  grid_[static_cast<size_t>(iy) * cells_x_ + ix] = occupied ? 1 : 0;
}

void Costmap2D::fill_rect(double x0, double y0, double x1, double y1, bool occupied) {
  for (int iy = 0; iy < cells_y_; ++iy) {
    const double cy = origin_y_ + (iy + 0.5) * resolution_;
    if (cy < y0 || cy > y1) continue;
    for (int ix = 0; ix < cells_x_; ++ix) {
      const double cx = origin_x_ + (ix + 0.5) * resolution_;
      if (cx < x0 || cx > x1) continue;
      grid_[static_cast<size_t>(iy) * cells_x_ + ix] = occupied ? 1 : 0;
    }
  }
}

Costmap2D Costmap2D::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("costmap: cannot open '" + path + "'");

  auto header_value = [&](const char* key, int line_no) {
    std::string line;
    if (!std::getline(in, line)) {
      throw Error("costmap '" + path + "': truncated header at line " + std::to_string(line_no));
    }
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    if (name != key) {
      throw Error("costmap '" + path + "' line " + std::to_string(line_no) + ": expected '" +
                  key + "', got '" + name + "'");
    }
    return ls;
  };

  double width = 0, height = 0, resolution = 0, ox = 0, oy = 0;
  {
    auto ls = header_value("width_m", 1);
    if (!(ls >> width)) throw Error("costmap '" + path + "' line 1: bad width_m value");
  }
  {
    auto ls = header_value("height_m", 2);
    if (!(ls >> height)) throw Error("costmap '" + path + "' line 2: bad height_m value");
  }
  {
    auto ls = header_value("resolution", 3);
    if (!(ls >> resolution)) throw Error("costmap '" + path + "' line 3: bad resolution value");
  }
  {
    auto ls = header_value("origin", 4);
    if (!(ls >> ox >> oy)) throw Error("costmap '" + path + "' line 4: bad origin values");
  }

  Costmap2D map(width, height, resolution, ox, oy);
  for (int iy = 0; iy < map.cells_y_; ++iy) {
    std::string line;
    if (!std::getline(in, line)) {
      throw Error("costmap '" + path + "': missing cell row " + std::to_string(iy));
    }
    std::istringstream ls(line);
    for (int ix = 0; ix < map.cells_x_; ++ix) {
      int v = 0;
      if (!(ls >> v) || (v != 0 && v != 1)) {
        throw Error("costmap '" + path + "' line " + std::to_string(5 + iy) +
                    ": cell values must be 0 or 1");
      }
      map.grid_[static_cast<size_t>(iy) * map.cells_x_ + ix] = static_cast<uint8_t>(v);
    }
  }
  return map;
}

void Costmap2D::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("costmap: cannot open '" + path + "' for writing");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "width_m %.9g\nheight_m %.9g\nresolution %.9g\norigin %.9g %.9g\n",
                width_m_, height_m_, resolution_, origin_x_, origin_y_);
  out << buf;
  for (int iy = 0; iy < cells_y_; ++iy) {
    for (int ix = 0; ix < cells_x_; ++ix) {
      if (ix > 0) out << ' ';
      out << static_cast<int>(grid_[static_cast<size_t>(iy) * cells_x_ + ix]);
    }
    out << '\n';
  }
}

}  // namespace smpc
