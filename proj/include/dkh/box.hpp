#pragma once

#include <cstddef>
#include <vector>

#include "dkh/grid.hpp"

namespace dkh {

/// Axis-aligned index-space box with inclusive bounds.
struct Box {
  CellIndex lo{0, 0, 0};
  CellIndex hi{0, 0, 0};

  std::size_t volume() const {
    std::size_t v = 1;
    for (int a = 0; a < 3; ++a) v *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
    return v;
  }
  int length(int axis) const { return hi[axis] - lo[axis] + 1; }
  bool contains(const CellIndex& c) const {
    for (int a = 0; a < 3; ++a)
      if (c[a] < lo[a] || c[a] > hi[a]) return false;
    return true;
  }
  bool intersects(const Box& o) const {
    for (int a = 0; a < 3; ++a)
      if (hi[a] < o.lo[a] || o.hi[a] < lo[a]) return false;
    return true;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

inline Box whole_domain(const GridSpec& grid) {
  return {{0, 0, 0}, {grid.cells(0) - 1, grid.cells(1) - 1, grid.cells(2) - 1}};
}

}  // namespace dkh
