#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hbndiff/errors.hpp"

namespace hbndiff {

/// Uniform square grid in the transverse (x, y) plane, centered on origin.
/// Nodes are cell-centered: x_i = origin.x - extent/2 + (i + 0.5) * spacing,
/// so the cells tile [origin - extent/2, origin + extent/2] exactly.
struct GridSpec {
  double extent = 0.0;                   ///< side length, Å
  int n_points = 0;                      ///< points per axis, power of two
  std::array<double, 2> origin{0.0, 0.0};  ///< grid center, Å

  double spacing() const { return extent / n_points; }
  double node_x(int ix) const { return origin[0] - 0.5 * extent + (ix + 0.5) * spacing(); }
  double node_y(int iy) const { return origin[1] - 0.5 * extent + (iy + 0.5) * spacing(); }
  std::size_t size() const { return static_cast<std::size_t>(n_points) * n_points; }

  bool operator==(const GridSpec& o) const {
    return extent == o.extent && n_points == o.n_points && origin == o.origin;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

inline void validate_grid(const GridSpec& g) {
  if (!(g.extent > 0.0)) throw ConfigError("grid extent must be > 0");
  if (g.n_points < 16 || !is_power_of_two(g.n_points))
    throw ConfigError("grid n_points must be a power of two >= 16");
}

/// Row-major scalar field on a GridSpec; index (ix, iy) -> values[iy * n + ix].
template <typename T>
struct Field2D {
  GridSpec grid;
  std::vector<T> values;

  Field2D() = default;
  explicit Field2D(const GridSpec& g, T fill = T{}) : grid(g), values(g.size(), fill) {}

  T& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.n_points + ix]; }
  const T& at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * grid.n_points + ix];
  }
};

}  // namespace hbndiff
